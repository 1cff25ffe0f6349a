#pragma once

// Factorization of univariate, bivariate and ternary homogeneous polynomials
// over F_{2^k}, and the absolute irreducibility test built on it.

#include <utility>
#include <vector>

#include "cbundle/poly.hpp"

namespace cbundle {

/// f = unit * prod(factor^mult); every factor is monic in graded-lex order.
struct Factorization {
  FieldElem unit;
  std::vector<std::pair<Poly, int>> factors;

  Poly expand(const Vars& vars) const;
};

struct FactorOptions {
  /// Specialization points tried (over all extension fields) before giving up.
  unsigned specialization_budget = 4096;
};

/// Deterministic order on polynomials used for canonical output.
bool canonical_less(const Poly& a, const Poly& b);

/// f must involve at most one variable.
Factorization univariate_factor(const Poly& f);

/// f must involve at most two variables.
Factorization bivariate_factor(const Poly& f, const FactorOptions& opt = {});

/// f homogeneous in exactly three variables (a plane curve equation).
Factorization homogeneous_factor(const Poly& f, const FactorOptions& opt = {});

/// Irreducible over the algebraic closure; f in two variables, or homogeneous
/// in three.
bool is_absolutely_irreducible(const Poly& f, const FactorOptions& opt = {});

/// Monic gcd of polynomials involving at most two variables.
Poly bivariate_gcd(const Poly& f, const Poly& g);

/// Monic gcd of forms in three variables (computed on the chart of the last
/// variable and homogenized back).
Poly homogeneous_gcd(const Poly& f, const Poly& g);

}  // namespace cbundle
