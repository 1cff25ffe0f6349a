#pragma once

// Sparse multivariate polynomials over F_{2^k} with named variables.
//
// Terms are kept sorted in descending graded-lexicographic order with no zero
// coefficients, so structural equality is polynomial equality.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbundle/gf2k.hpp"
#include "cbundle/upoly.hpp"

namespace cbundle {

inline constexpr std::size_t kMaxVars = 8;

struct Monomial {
  std::array<uint16_t, kMaxVars> exp{};

  unsigned total() const noexcept {
    unsigned t = 0;
    for (auto e : exp) t += e;
    return t;
  }
  bool divides(const Monomial& o) const noexcept {
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (exp[i] > o.exp[i]) return false;
    return true;
  }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Strict graded-lex "greater": larger total degree first, then lex.
bool grlex_greater(const Monomial& a, const Monomial& b) noexcept;

using Vars = std::shared_ptr<const std::vector<std::string>>;
Vars make_vars(std::vector<std::string> names);
bool same_vars(const Vars& a, const Vars& b) noexcept;

/// The base coordinates x, y, z shared by every base-plane polynomial.
const Vars& xyz_vars();

struct Homogeneity {
  bool zero = false;            // zero polynomial: homogeneous of every degree
  std::optional<int> degree;    // set iff nonzero and homogeneous
};

class Poly {
 public:
  struct Term {
    Monomial mono;
    uint64_t coeff;
  };

  Poly(const FieldCtx& ctx, Vars vars);

  static Poly constant(const FieldCtx& ctx, Vars vars, uint64_t c);
  static Poly constant(Vars vars, const FieldElem& c) { return constant(c.ctx(), std::move(vars), c.bits()); }
  static Poly variable(const FieldCtx& ctx, Vars vars, std::string_view name);
  static Poly monomial(const FieldCtx& ctx, Vars vars, const Monomial& m, uint64_t c = 1);
  /// Builds from arbitrary (possibly unsorted, repeated) terms.
  static Poly from_terms(const FieldCtx& ctx, Vars vars, std::vector<Term> terms);

  const FieldCtx& ctx() const noexcept { return *ctx_; }
  const Vars& vars() const noexcept { return vars_; }
  std::size_t nvars() const noexcept { return vars_->size(); }
  std::size_t var_index(std::string_view name) const;  // throws UnknownVariable
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;  // includes zero
  int total_degree() const noexcept;  // -1 for zero
  int degree_in(std::size_t var) const noexcept;
  Homogeneity homogeneity() const noexcept;
  FieldElem leading_coeff() const;
  FieldElem constant_term() const;
  /// Coefficient of a monomial (zero if absent).
  uint64_t coeff(const Monomial& m) const noexcept;
  /// Indices of the variables that actually occur.
  std::vector<std::size_t> support() const;
  /// Scaled so the leading (graded-lex) coefficient is one.
  Poly monic() const;
  Poly scaled(uint64_t c) const;

  Poly& operator+=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a += b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) noexcept;
  friend bool operator!=(const Poly& a, const Poly& b) noexcept { return !(a == b); }

  std::string to_string() const;

 private:
  void check_compatible(const Poly& o, const char* op) const;

  const FieldCtx* ctx_;
  Vars vars_;
  std::vector<Term> terms_;
};

Poly pow(const Poly& p, unsigned e);
/// Throws NotDivisible when q does not divide p.
Poly exact_div(const Poly& p, const Poly& q);
std::optional<Poly> try_exact_div(const Poly& p, const Poly& q);
/// Frobenius: exponents double, coefficients square.
Poly square(const Poly& p);
/// The unique square root when p is a square.
std::optional<Poly> square_root(const Poly& p);
Poly partial_derivative(const Poly& p, std::size_t var);
Poly partial_derivative(const Poly& p, std::string_view var);

/// Ring map sending variable i of p to images[i]. Images share one context
/// and variable list; p's coefficients are embedded into that context.
Poly compose(const Poly& p, std::span<const Poly> images);
/// Substitutes the named variables; others are left alone. Values are
/// polynomials in p's variables (possibly over an extension of p's field).
Poly substitute(const Poly& p, const std::map<std::string, Poly>& assignment);
Poly substitute(const Poly& p, std::string_view var, const FieldElem& value);
FieldElem evaluate(const Poly& p, std::span<const FieldElem> point);

/// Coefficients embedded into an extension (or identity).
Poly embed(const Poly& p, const FieldCtx& target);
/// Coefficients pulled back into a subfield; nullopt if impossible.
std::optional<Poly> descend(const Poly& p, const FieldCtx& sub);
/// Same polynomial over a different variable list (matched by name).
Poly with_vars(const Poly& p, const Vars& vars);

/// p as a polynomial in `var` with coefficients in the remaining variables
/// (coefficient i is returned with var's exponent removed).
std::vector<Poly> coefficients_in(const Poly& p, std::size_t var);
/// p must involve no variable other than `var`.
UPoly to_upoly(const Poly& p, std::size_t var);
Poly from_upoly(const UPoly& u, Vars vars, std::size_t var);

/// Sylvester resultant eliminating `var` (fraction-free determinant).
Poly resultant(const Poly& f, const Poly& g, std::size_t var);
Poly resultant(const Poly& f, const Poly& g, std::string_view var);

/// Monic gcd of two binary forms in the same two variables.
Poly binary_gcd(const Poly& f, const Poly& g);

/// Homogenizes a polynomial on (u,v) = vars of `target` minus `w` to degree d.
Poly homogenize(const Poly& affine, std::size_t w, int degree);

Poly parse_poly(std::string_view text, const FieldCtx& ctx, const Vars& vars);

/// Field element literal or constant expression ("0", "j+1", "F16:a").
FieldElem parse_constant(std::string_view text, const FieldCtx& ctx);

}  // namespace cbundle
