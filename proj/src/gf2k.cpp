#include "cbundle/gf2k.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <vector>

#if defined(__PCLMUL__)
#include <immintrin.h>
#endif

#include "cbundle/upoly.hpp"

namespace cbundle {

namespace {

using u128 = unsigned __int128;

// Low parts of the numerically smallest irreducible polynomial of each
// degree 1..64 over the two-element field (degree 1 uses t itself).
constexpr std::array<uint64_t, 64> kModulusLow = {
    0x0,  0x3,  0x3,  0x3,  0x5,  0x3,  0x3,  0x1b, 0x3,  0x9,  0x5,  0x9,  0x1b,
    0x21, 0x3,  0x2b, 0x9,  0x9,  0x27, 0x9,  0x5,  0x3,  0x21, 0x1b, 0x9,  0x1b,
    0x27, 0x3,  0x5,  0x3,  0x9,  0x8d, 0x4b, 0x1b, 0x5,  0x35, 0x3f, 0x63, 0x11,
    0x39, 0x9,  0x27, 0x59, 0x21, 0x1b, 0x3,  0x21, 0x2d, 0x71, 0x1d, 0x4b, 0x9,
    0x47, 0x7d, 0x47, 0x95, 0x11, 0x63, 0x7b, 0x3,  0x27, 0x69, 0x3,  0x1b,
};

inline u128 clmul(uint64_t a, uint64_t b) noexcept {
#if defined(__PCLMUL__)
  const __m128i r = _mm_clmulepi64_si128(_mm_cvtsi64_si128(static_cast<long long>(a)),
                                         _mm_cvtsi64_si128(static_cast<long long>(b)), 0);
  alignas(16) uint64_t out[2];
  _mm_store_si128(reinterpret_cast<__m128i*>(out), r);
  return (static_cast<u128>(out[1]) << 64) | out[0];
#else
  u128 r = 0;
  u128 aa = a;
  while (b) {
    if (b & 1) r ^= aa;
    aa <<= 1;
    b >>= 1;
  }
  return r;
#endif
}

inline uint64_t reduce(u128 p, unsigned k, uint64_t low, uint64_t mask) noexcept {
  for (;;) {
    const u128 hi = p >> k;
    if (hi == 0) return static_cast<uint64_t>(p);
    // hi has fewer than k+1 bits after the first pass; it fits a word.
    p = (p & mask) ^ clmul(static_cast<uint64_t>(hi), low);
  }
}

int deg128(u128 a) {
  if (a == 0) return -1;
  const uint64_t hi = static_cast<uint64_t>(a >> 64);
  if (hi) return 127 - __builtin_clzll(hi);
  return 63 - __builtin_clzll(static_cast<uint64_t>(a));
}

u128 mod128(u128 a, u128 m) {
  const int dm = deg128(m);
  for (int da = deg128(a); da >= dm; da = deg128(a)) a ^= m << (da - dm);
  return a;
}

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    a = mod128(a, b);
    std::swap(a, b);
  }
  return a;
}

}  // namespace

uint64_t modulus_table_entry(unsigned k) {
  if (k < 1 || k > FieldCtx::kMaxDegree)
    throw Error(ErrorCode::UnsupportedDegree, "k = " + std::to_string(k));
  return kModulusLow[k - 1];
}

bool is_irreducible_binary(unsigned k, uint64_t low) {
  if (k == 1) return true;
  const uint64_t mask = k == 64 ? ~uint64_t{0} : (uint64_t{1} << k) - 1;
  if ((low & ~mask) != 0) return false;
  const u128 m = (static_cast<u128>(1) << k) | low;
  auto frob = [&](uint64_t x, unsigned times) {
    for (unsigned i = 0; i < times; ++i) x = reduce(clmul(x, x), k, low, mask);
    return x;
  };
  // t^(2^k) = t mod m, and gcd(t^(2^(k/p)) - t, m) = 1 for each prime p | k.
  if (frob(2, k) != 2) return false;
  unsigned n = k;
  for (unsigned p = 2; p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    const uint64_t h = frob(2, k / p) ^ 2;
    if (deg128(gcd128(m, h)) != 0) return false;
  }
  return true;
}

FieldCtx::FieldCtx(unsigned k, uint64_t low)
    : k_(k), low_(low), mask_(k == 64 ? ~uint64_t{0} : (uint64_t{1} << k) - 1) {
  if (!is_irreducible_binary(k, low))
    throw Error(ErrorCode::UnsupportedDegree, "modulus of degree " + std::to_string(k) +
                                                  " is not irreducible");
}

const FieldCtx& field_new(unsigned k) {
  if (k < 1 || k > FieldCtx::kMaxDegree)
    throw Error(ErrorCode::UnsupportedDegree, "k = " + std::to_string(k));
  static std::array<std::unique_ptr<FieldCtx>, FieldCtx::kMaxDegree> table;
  static std::array<std::once_flag, FieldCtx::kMaxDegree> once;
  std::call_once(once[k - 1], [k] { table[k - 1].reset(new FieldCtx(k, kModulusLow[k - 1])); });
  return *table[k - 1];
}

std::string FieldCtx::name() const {
  if (k_ == 64) return "F18446744073709551616";
  return "F" + std::to_string(uint64_t{1} << k_);
}

uint64_t FieldCtx::mul(uint64_t a, uint64_t b) const noexcept {
  return reduce(clmul(a, b), k_, low_, mask_);
}

uint64_t FieldCtx::pow(uint64_t a, uint64_t e) const noexcept {
  uint64_t r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

uint64_t FieldCtx::inv(uint64_t a) const {
  if (a == 0) throw Error(ErrorCode::DivisionByZero, "inverse of zero in " + name());
  // a^(2^k - 2) = prod_{i=1}^{k-1} a^(2^i)
  uint64_t r = 1;
  uint64_t s = a;
  for (unsigned i = 1; i < k_; ++i) {
    s = sqr(s);
    r = mul(r, s);
  }
  return r;
}

uint64_t FieldCtx::sqrt(uint64_t a) const noexcept { return frobenius(a, k_ - 1); }

uint64_t FieldCtx::frobenius(uint64_t a, unsigned times) const noexcept {
  times %= k_;
  for (unsigned i = 0; i < times; ++i) a = sqr(a);
  return a;
}

unsigned FieldCtx::trace(uint64_t a) const noexcept {
  uint64_t t = a;
  uint64_t s = a;
  for (unsigned i = 1; i < k_; ++i) {
    s = sqr(s);
    t ^= s;
  }
  return static_cast<unsigned>(t & 1);
}

unsigned FieldCtx::subfield_degree(uint64_t a) const noexcept {
  for (unsigned d = 1; d < k_; ++d)
    if (k_ % d == 0 && frobenius(a, d) == a) return d;
  return k_;
}

std::string FieldCtx::format(uint64_t bits) const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  do {
    hex.insert(hex.begin(), kHex[bits & 0xf]);
    bits >>= 4;
  } while (bits);
  return name() + ":" + hex;
}

FieldElem::FieldElem(const FieldCtx& ctx, uint64_t bits) : ctx_(&ctx), bits_(bits) {
  if ((bits & ~ctx.mask()) != 0)
    throw Error(ErrorCode::InvalidInput, "bit vector exceeds degree of " + ctx.name());
}

FieldElem FieldElem::inv() const { return {*ctx_, ctx_->inv(bits_)}; }

FieldElem& FieldElem::operator+=(const FieldElem& o) {
  if (ctx_ != o.ctx_)
    throw Error(ErrorCode::ContextMismatch, ctx_->name() + " + " + o.ctx_->name());
  bits_ ^= o.bits_;
  return *this;
}

FieldElem& FieldElem::operator*=(const FieldElem& o) {
  if (ctx_ != o.ctx_)
    throw Error(ErrorCode::ContextMismatch, ctx_->name() + " * " + o.ctx_->name());
  bits_ = ctx_->mul(bits_, o.bits_);
  return *this;
}

bool operator==(const FieldElem& a, const FieldElem& b) {
  if (a.ctx_ != b.ctx_)
    throw Error(ErrorCode::ContextMismatch, a.ctx_->name() + " == " + b.ctx_->name());
  return a.bits_ == b.bits_;
}

// ---------------------------------------------------------------------------
// Compatible embeddings.
//
// For every pair d | k we fix the image r of the generator of F_{2^d} in
// F_{2^k}: the numerically smallest root of the degree-d modulus such that
// for every proper divisor e of d, embedding F_{2^e} through F_{2^d} agrees
// with the direct embedding F_{2^e} -> F_{2^k}. Choices are made for e in
// increasing order, so the constraints are always satisfiable.

namespace {

struct Embedding {
  unsigned from = 0;
  unsigned to = 0;
  std::array<uint64_t, 64> basis{};  // image of g^i
  // Echelon form of the basis images for inverting the map.
  std::vector<std::pair<uint64_t, uint64_t>> echelon;  // (row, combination)

  uint64_t apply(uint64_t bits) const noexcept {
    uint64_t r = 0;
    for (unsigned i = 0; bits; ++i, bits >>= 1)
      if (bits & 1) r ^= basis[i];
    return r;
  }

  std::optional<uint64_t> invert(uint64_t y) const {
    uint64_t acc = 0;
    for (const auto& [row, comb] : echelon) {
      const uint64_t pivot = row & (~row + 1);
      if (y & pivot) {
        y ^= row;
        acc ^= comb;
      }
    }
    if (y != 0) return std::nullopt;
    return acc;
  }
};

std::mutex& embedding_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::pair<unsigned, unsigned>, std::unique_ptr<Embedding>>& embedding_cache() {
  static std::map<std::pair<unsigned, unsigned>, std::unique_ptr<Embedding>> cache;
  return cache;
}

const Embedding& embedding_locked(unsigned from, unsigned to);

Embedding build_embedding(unsigned from, unsigned to, uint64_t root) {
  const FieldCtx& target = field_new(to);
  Embedding e;
  e.from = from;
  e.to = to;
  uint64_t p = 1;
  for (unsigned i = 0; i < from; ++i) {
    e.basis[i] = p;
    p = target.mul(p, root);
  }
  if (from == 1) e.basis[0] = 1;
  // Echelon form: pivot on the lowest set bit of each row.
  std::vector<std::pair<uint64_t, uint64_t>> rows;
  for (unsigned i = 0; i < from; ++i) {
    uint64_t row = e.basis[i];
    uint64_t comb = uint64_t{1} << i;
    for (const auto& [r, c] : rows) {
      const uint64_t pivot = r & (~r + 1);
      if (row & pivot) {
        row ^= r;
        comb ^= c;
      }
    }
    if (row == 0) continue;
    const uint64_t pivot = row & (~row + 1);
    for (auto& [r, c] : rows)
      if (r & pivot) {
        r ^= row;
        c ^= comb;
      }
    rows.emplace_back(row, comb);
  }
  e.echelon = std::move(rows);
  return e;
}

const Embedding& embedding_locked(unsigned from, unsigned to) {
  auto& cache = embedding_cache();
  const auto key = std::make_pair(from, to);
  if (auto it = cache.find(key); it != cache.end()) return *it->second;

  const FieldCtx& target = field_new(to);
  uint64_t root = 0;
  if (from == to) {
    root = to == 1 ? 0 : 2;
  } else if (from == 1) {
    root = 0;
  } else {
    // Roots of the degree-`from` modulus in the target field.
    std::vector<uint64_t> mod(from + 1, 0);
    const uint64_t low = modulus_table_entry(from);
    for (unsigned i = 0; i < from; ++i) mod[i] = (low >> i) & 1;
    mod[from] = 1;
    const UPoly m(target, mod);
    std::vector<uint64_t> candidates = roots(m);
    std::vector<unsigned> divisors;
    for (unsigned e = 2; e < from; ++e)
      if (from % e == 0) divisors.push_back(e);
    bool found = false;
    for (uint64_t r : candidates) {
      const Embedding trial = build_embedding(from, to, r);
      bool ok = true;
      for (unsigned e : divisors) {
        const Embedding& inner = embedding_locked(e, from);
        const Embedding& direct = embedding_locked(e, to);
        if (trial.apply(inner.apply(2)) != direct.apply(2)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        root = r;
        found = true;
        break;
      }
    }
    if (!found)
      throw Error(ErrorCode::NoEmbedding, "no compatible root for F" + std::to_string(from) +
                                              " in " + target.name());
  }
  auto emb = std::make_unique<Embedding>(build_embedding(from, to, root));
  const Embedding& ref = *emb;
  cache.emplace(key, std::move(emb));
  return ref;
}

const Embedding& embedding(unsigned from, unsigned to) {
  if (from == 0 || to == 0 || to % from != 0)
    throw Error(ErrorCode::NoEmbedding,
                "degree " + std::to_string(from) + " does not divide " + std::to_string(to));
  std::lock_guard<std::mutex> lock(embedding_mutex());
  return embedding_locked(from, to);
}

}  // namespace

uint64_t embed_bits(uint64_t bits, unsigned from, unsigned to) {
  if (from == to) return bits;
  if (from == 1) return bits;
  return embedding(from, to).apply(bits);
}

std::optional<uint64_t> descend_bits(uint64_t bits, unsigned from, unsigned to) {
  if (from == to) return bits;
  if (from == 1) {
    if (bits > 1) return std::nullopt;
    return bits;
  }
  return embedding(from, to).invert(bits);
}

FieldElem embed(const FieldElem& a, const FieldCtx& target) {
  const unsigned from = a.ctx().degree();
  if (target.degree() % from != 0)
    throw Error(ErrorCode::NoEmbedding, a.ctx().name() + " -> " + target.name());
  return {target, embed_bits(a.bits(), from, target.degree())};
}

std::optional<FieldElem> descend(const FieldElem& a, const FieldCtx& sub) {
  if (a.ctx().degree() % sub.degree() != 0)
    throw Error(ErrorCode::NoEmbedding, sub.name() + " -> " + a.ctx().name());
  auto bits = descend_bits(a.bits(), sub.degree(), a.ctx().degree());
  if (!bits) return std::nullopt;
  return FieldElem(sub, *bits);
}

FieldElem parse_field_literal(std::string_view text, const FieldCtx& ctx) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::ParseError, "field literal '" + std::string(text) + "': " + why);
  };
  if (text.size() < 4 || text[0] != 'F') throw fail("expected F<q>:<hex>");
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw fail("missing ':'");
  const std::string q(text.substr(1, colon - 1));
  unsigned k = 0;
  if (q == "18446744073709551616") {
    k = 64;
  } else {
    uint64_t size = 0;
    try {
      size = std::stoull(q);
    } catch (...) {
      throw fail("bad field size");
    }
    if (size < 2 || (size & (size - 1)) != 0) throw fail("field size must be a power of two");
    k = static_cast<unsigned>(__builtin_ctzll(size));
  }
  const std::string_view hex = text.substr(colon + 1);
  if (hex.empty() || hex.size() > 16) throw fail("bad hex digits");
  uint64_t bits = 0;
  for (char c : hex) {
    unsigned v = 0;
    if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A' + 10);
    else throw fail("bad hex digit");
    bits = (bits << 4) | v;
  }
  const FieldCtx& src = field_new(k);
  if ((bits & ~src.mask()) != 0) throw fail("value exceeds field degree");
  if (ctx.degree() % k != 0)
    throw Error(ErrorCode::NoEmbedding, src.name() + " -> " + ctx.name());
  return embed(FieldElem(src, bits), ctx);
}

FieldElem cube_root_of_unity(const FieldCtx& ctx) {
  return embed(FieldElem::generator(field_new(2)), ctx);
}

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::NoEmbedding: return "NoEmbedding";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::TooManyVariables: return "TooManyVariables";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::UnluckySpecializationExhausted: return "UnluckySpecializationExhausted";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::NotFlat: return "NotFlat";
    case ErrorCode::NotGenericallySmooth: return "NotGenericallySmooth";
    case ErrorCode::PositiveDimensional: return "PositiveDimensional";
    case ErrorCode::ExtensionBound: return "ExtensionBound";
    case ErrorCode::NotSquarefree: return "NotSquarefree";
    case ErrorCode::CommonComponent: return "CommonComponent";
    case ErrorCode::BezoutMismatch: return "BezoutMismatch";
    case ErrorCode::NotOnCurve: return "NotOnCurve";
    case ErrorCode::FiberNotDegenerate: return "FiberNotDegenerate";
    case ErrorCode::UnreducedParametrization: return "UnreducedParametrization";
    case ErrorCode::NotSingularHere: return "NotSingularHere";
    case ErrorCode::FactorizationMismatch: return "FactorizationMismatch";
    case ErrorCode::NotAbsolutelyIrreducible: return "NotAbsolutelyIrreducible";
    case ErrorCode::NotAComponent: return "NotAComponent";
    case ErrorCode::ZeroEquation: return "ZeroEquation";
    case ErrorCode::EliminationFailed: return "EliminationFailed";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace cbundle
