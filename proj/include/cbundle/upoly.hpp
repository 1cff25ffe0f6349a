#pragma once

// Dense univariate polynomials over F_{2^k}, coefficients stored low to high
// as raw field bit vectors. This is the workhorse behind root finding,
// factorization and the embedding machinery.

#include <cstdint>
#include <utility>
#include <vector>

#include "cbundle/gf2k.hpp"

namespace cbundle {

class UPoly {
 public:
  explicit UPoly(const FieldCtx& ctx) : ctx_(&ctx) {}
  UPoly(const FieldCtx& ctx, std::vector<uint64_t> coeffs);

  static UPoly constant(const FieldCtx& ctx, uint64_t c) { return UPoly(ctx, {c}); }
  static UPoly monomial(const FieldCtx& ctx, unsigned degree, uint64_t c = 1);
  static UPoly x(const FieldCtx& ctx) { return monomial(ctx, 1); }

  const FieldCtx& ctx() const noexcept { return *ctx_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  bool is_one() const noexcept { return c_.size() == 1 && c_[0] == 1; }
  uint64_t coeff(std::size_t i) const noexcept { return i < c_.size() ? c_[i] : 0; }
  uint64_t lead() const noexcept { return c_.empty() ? 0 : c_.back(); }
  const std::vector<uint64_t>& coeffs() const noexcept { return c_; }

  UPoly monic() const;
  UPoly derivative() const;
  UPoly scaled(uint64_t c) const;
  UPoly shifted(unsigned n) const;  // times x^n
  uint64_t eval(uint64_t point) const;

  UPoly& operator+=(const UPoly& o);
  friend UPoly operator+(UPoly a, const UPoly& b) { return a += b; }
  friend UPoly operator-(UPoly a, const UPoly& b) { return a += b; }
  friend UPoly operator*(const UPoly& a, const UPoly& b);
  friend bool operator==(const UPoly& a, const UPoly& b) {
    return a.ctx_ == b.ctx_ && a.c_ == b.c_;
  }

 private:
  void trim();

  const FieldCtx* ctx_;
  std::vector<uint64_t> c_;
};

std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b);
UPoly operator/(const UPoly& a, const UPoly& b);
UPoly operator%(const UPoly& a, const UPoly& b);

/// Monic gcd; gcd(0, 0) = 0.
UPoly gcd(UPoly a, UPoly b);

struct ExtendedGcd {
  UPoly g, s, t;  // s*a + t*b = g, g monic
};
ExtendedGcd xgcd(const UPoly& a, const UPoly& b);

/// a^(2^n) mod m, by n squarings.
UPoly frobenius_mod(const UPoly& a, unsigned n, const UPoly& m);
UPoly square_mod(const UPoly& a, const UPoly& m);
UPoly mulmod(const UPoly& a, const UPoly& b, const UPoly& m);

/// Square root of a polynomial whose odd coefficients vanish.
UPoly poly_sqrt(const UPoly& f);

using UFactorList = std::vector<std::pair<UPoly, int>>;

/// Monic squarefree parts with multiplicities (characteristic-2 safe).
UFactorList squarefree_decomposition(const UPoly& f);

/// Monic irreducible factors with multiplicities, in canonical order
/// (by degree, then coefficients). Leading coefficient is dropped.
UFactorList factor(const UPoly& f);

bool is_irreducible(const UPoly& f);

/// Distinct roots of f lying in f's coefficient field, sorted.
std::vector<uint64_t> roots(const UPoly& f);

UPoly embed(const UPoly& f, const FieldCtx& target);

/// Canonical order used for deterministic output.
bool canonical_less(const UPoly& a, const UPoly& b);

}  // namespace cbundle
