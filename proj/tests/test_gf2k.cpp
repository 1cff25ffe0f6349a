#include <random>

#include "cbundle/gf2k.hpp"
#include "cbundle/upoly.hpp"
#include "doctest.h"

using namespace cbundle;

namespace {

// Schoolbook multiplication modulo t^k + low, bit by bit.
uint64_t naive_mul(uint64_t a, uint64_t b, unsigned k, uint64_t low) {
  uint64_t r = 0;
  for (unsigned i = 0; i < k; ++i) {
    if ((b >> i) & 1) r ^= a;
    const bool carry = (a >> (k - 1)) & 1;
    a = (k == 64) ? (a << 1) : ((a << 1) & ((uint64_t{1} << k) - 1));
    if (carry) a ^= low;
  }
  return r;
}

unsigned mult_order(const FieldCtx& F, uint64_t a) {
  uint64_t x = a;
  unsigned n = 1;
  while (x != 1) {
    x = F.mul(x, a);
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("field_new rejects degrees outside 1..64") {
  CHECK_THROWS_AS(field_new(0), Error);
  CHECK_THROWS_AS(field_new(65), Error);
  try {
    field_new(65);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedDegree);
  }
}

TEST_CASE("small fields have the expected presentation") {
  const FieldCtx& F2 = field_new(1);
  CHECK(F2.name() == "F2");
  CHECK(F2.mul(1, 1) == 1);
  const FieldCtx& F4 = field_new(2);
  CHECK(F4.modulus_low() == 0x3);
  const FieldElem j = FieldElem::generator(F4);
  CHECK(j * j == j + FieldElem::one(F4));
  CHECK(j.inv() == j + FieldElem::one(F4));
  CHECK(j.sqrt() == j + FieldElem::one(F4));
  CHECK(j.to_string() == "F4:2");
  const FieldCtx& F16 = field_new(4);
  CHECK(F16.modulus_low() == 0x3);
  CHECK(FieldElem::generator(F16).pow(15).is_one());
  CHECK(mult_order(F16, 2) == 15);
  CHECK(field_new(8).modulus_low() == 0x1b);
  CHECK(field_new(64).modulus_low() == 0x1b);
}

TEST_CASE("modulus table entries are the smallest irreducibles") {
  for (unsigned k = 2; k <= 64; ++k) {
    const uint64_t low = modulus_table_entry(k);
    CHECK(is_irreducible_binary(k, low));
    for (uint64_t c = 1; c < low; c += 2) CHECK_FALSE(is_irreducible_binary(k, c));
  }
}

TEST_CASE("trial division agrees with the Rabin test for small degrees") {
  for (unsigned k = 2; k <= 12; ++k) {
    for (uint64_t low = 1; low < (uint64_t{1} << k); low += 2) {
      const uint64_t f = (uint64_t{1} << k) | low;
      bool irreducible = true;
      for (uint64_t g = 2; g < (uint64_t{1} << (k / 2 + 1)) && irreducible; ++g) {
        // polynomial remainder of f by g
        uint64_t r = f;
        const int dg = 63 - __builtin_clzll(g);
        while (r && 63 - __builtin_clzll(r) >= dg) r ^= g << ((63 - __builtin_clzll(r)) - dg);
        if (r == 0) irreducible = false;
      }
      CHECK(is_irreducible_binary(k, low) == irreducible);
    }
  }
}

TEST_CASE("multiplication agrees with the bitwise oracle") {
  std::mt19937_64 rng(7);
  for (unsigned k = 1; k <= 64; ++k) {
    const FieldCtx& F = field_new(k);
    for (int i = 0; i < 200; ++i) {
      const uint64_t a = rng() & F.mask(), b = rng() & F.mask();
      CHECK(F.mul(a, b) == naive_mul(a, b, k, F.modulus_low()));
    }
  }
}

TEST_CASE("field axioms hold exhaustively for k <= 4") {
  for (unsigned k = 1; k <= 4; ++k) {
    const FieldCtx& F = field_new(k);
    const uint64_t q = uint64_t{1} << k;
    for (uint64_t a = 0; a < q; ++a) {
      if (a) CHECK(F.mul(a, F.inv(a)) == 1);
      CHECK(F.sqr(F.sqrt(a)) == a);
      for (uint64_t b = 0; b < q; ++b) {
        CHECK(F.mul(a, b) == F.mul(b, a));
        CHECK(F.sqr(a ^ b) == (F.sqr(a) ^ F.sqr(b)));
        for (uint64_t c = 0; c < q; ++c) {
          CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
          CHECK(F.mul(a, b ^ c) == (F.mul(a, b) ^ F.mul(a, c)));
        }
      }
    }
  }
}

TEST_CASE("frobenius additivity and sqrt on larger fields (randomized)") {
  std::mt19937_64 rng(11);
  for (unsigned k : {5u, 8u, 13u, 24u, 31u, 64u}) {
    const FieldCtx& F = field_new(k);
    for (int i = 0; i < 500; ++i) {
      const uint64_t a = rng() & F.mask(), b = rng() & F.mask();
      CHECK(F.sqr(a ^ b) == (F.sqr(a) ^ F.sqr(b)));
      CHECK(F.sqr(F.sqrt(a)) == a);
      if (a) CHECK(F.mul(a, F.inv(a)) == 1);
      CHECK(F.trace(a ^ b) == (F.trace(a) ^ F.trace(b)));
    }
  }
}

TEST_CASE("inverse of zero and context mixing are errors") {
  const FieldCtx& F4 = field_new(2);
  const FieldCtx& F16 = field_new(4);
  CHECK_THROWS_AS(FieldElem::zero(F4).inv(), Error);
  CHECK_THROWS_AS(FieldElem::one(F4) + FieldElem::one(F16), Error);
  try {
    (void)(FieldElem::one(F4) * FieldElem::one(F16));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ContextMismatch);
  }
}

TEST_CASE("embeddings are homomorphic, injective and compatible") {
  const FieldCtx& F4 = field_new(2);
  const FieldCtx& F16 = field_new(4);
  const FieldElem j16 = embed(FieldElem::generator(F4), F16);
  CHECK(mult_order(F16, j16.bits()) == 3);
  CHECK(embed(FieldElem::one(field_new(1)), F4).is_one());
  CHECK_THROWS_AS(embed(FieldElem::generator(F4), field_new(3)), Error);
  std::mt19937_64 rng(3);
  for (auto [from, to] : {std::pair{2u, 4u}, {2u, 8u}, {4u, 8u}, {3u, 12u}, {4u, 12u}, {6u, 24u}, {8u, 24u}, {1u, 7u}}) {
    const FieldCtx& A = field_new(from);
    const FieldCtx& B = field_new(to);
    for (int i = 0; i < 100; ++i) {
      const uint64_t a = rng() & A.mask(), b = rng() & A.mask();
      CHECK(embed_bits(A.mul(a, b), from, to) == B.mul(embed_bits(a, from, to), embed_bits(b, from, to)));
      CHECK(embed_bits(a ^ b, from, to) == (embed_bits(a, from, to) ^ embed_bits(b, from, to)));
      if (a != b) CHECK(embed_bits(a, from, to) != embed_bits(b, from, to));
      CHECK(descend_bits(embed_bits(a, from, to), from, to) == a);
    }
  }
  // Towers commute: F4 -> F16 -> F256 equals F4 -> F256.
  for (uint64_t a = 0; a < 4; ++a) CHECK(embed_bits(embed_bits(a, 2, 4), 4, 8) == embed_bits(a, 2, 8));
  for (uint64_t a = 0; a < 16; ++a) CHECK(embed_bits(embed_bits(a, 4, 8), 8, 24) == embed_bits(a, 4, 24));
  // An element outside the subfield does not descend.
  CHECK_FALSE(descend_bits(2, 2, 4).has_value());
}

TEST_CASE("field literals parse and embed") {
  const FieldCtx& F16 = field_new(4);
  CHECK(parse_field_literal("F16:2", F16).bits() == 2);
  CHECK(parse_field_literal("F4:2", F16) == cube_root_of_unity(F16));
  CHECK_THROWS_AS(parse_field_literal("F5:1", F16), Error);
  CHECK_THROWS_AS(parse_field_literal("F8:1", F16), Error);
  CHECK_THROWS_AS(parse_field_literal("F4:7", F16), Error);
  CHECK(field_new(4).format(0xa) == "F16:a");
}

TEST_CASE("univariate factorization") {
  const FieldCtx& F2 = field_new(1);
  SUBCASE("t^15 + 1 over F2") {
    std::vector<uint64_t> c(16, 0);
    c[0] = c[15] = 1;
    const UPoly f(F2, c);
    const auto fac = factor(f);
    // Irreducibles of degree 1, 2, 4 other than t: 1 + 1 + 3.
    CHECK(fac.size() == 5);
    UPoly prod = UPoly::constant(F2, 1);
    int total = 0;
    for (const auto& [p, m] : fac) {
      CHECK(m == 1);
      CHECK(is_irreducible(p));
      CHECK(p.coeff(0) == 1);
      total += p.degree();
      prod = prod * p;
    }
    CHECK(total == 15);
    CHECK(prod == f);
  }
  SUBCASE("t^2 over F2") {
    const auto fac = factor(UPoly::monomial(F2, 2));
    REQUIRE(fac.size() == 1);
    CHECK(fac[0].first == UPoly::x(F2));
    CHECK(fac[0].second == 2);
  }
  SUBCASE("t^2 + t + 1 over F4 splits") {
    const FieldCtx& F4 = field_new(2);
    const auto fac = factor(UPoly(F4, {1, 1, 1}));
    REQUIRE(fac.size() == 2);
    CHECK(fac[0].first == UPoly(F4, {2, 1}));
    CHECK(fac[1].first == UPoly(F4, {3, 1}));
    CHECK(roots(UPoly(F4, {1, 1, 1})) == std::vector<uint64_t>{2, 3});
  }
  SUBCASE("random products re-expand") {
    std::mt19937_64 rng(99);
    for (unsigned k : {1u, 2u, 3u, 4u, 8u}) {
      const FieldCtx& F = field_new(k);
      for (int it = 0; it < 40; ++it) {
        UPoly f = UPoly::constant(F, 1);
        const int nf = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < nf; ++i) {
          std::vector<uint64_t> c(1 + rng() % 5);
          for (auto& x : c) x = rng() & F.mask();
          c.back() = 1;
          f = f * UPoly(F, c);
        }
        UPoly prod = UPoly::constant(F, 1);
        for (const auto& [p, m] : factor(f)) {
          CHECK(is_irreducible(p));
          for (int i = 0; i < m; ++i) prod = prod * p;
        }
        CHECK(prod == f.monic());
      }
    }
  }
}

TEST_CASE("roots agree with exhaustive evaluation") {
  std::mt19937_64 rng(5);
  for (unsigned k : {1u, 2u, 3u, 4u, 6u}) {
    const FieldCtx& F = field_new(k);
    for (int it = 0; it < 30; ++it) {
      std::vector<uint64_t> c(2 + rng() % 7);
      for (auto& x : c) x = rng() & F.mask();
      c.back() = 1;
      const UPoly f(F, c);
      std::vector<uint64_t> expect;
      for (uint64_t a = 0; a < (uint64_t{1} << k); ++a)
        if (f.eval(a) == 0) expect.push_back(a);
      CHECK(roots(f) == expect);
    }
  }
}
