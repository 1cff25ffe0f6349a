#pragma once

// Plane-curve geometry over the algebraic closure of F_{2^k}, and local
// smoothness of conic-bundle total spaces along degenerate fibers.

#include <span>
#include <vector>

#include "cbundle/conic.hpp"

namespace cbundle {

inline constexpr unsigned kDefaultKMax = 24;

struct AlgebraicPointSet {
  enum class Kind { EliminationClosure, BezoutCount };

  std::vector<ProjPoint> points;  // canonical order, minimal fields
  Kind kind = Kind::EliminationClosure;
  std::vector<int> eliminant_degrees;  // EliminationClosure
  int expected = 0;                    // BezoutCount
  int found = 0;

  bool contains(const ProjPoint& p) const;
  std::string kind_name() const { return kind == Kind::BezoutCount ? "BezoutCount" : "EliminationClosure"; }
};

/// All common projective zeros of homogeneous polynomials in x, y, z.
/// PositiveDimensional if they share a factor; ExtensionBound if a point
/// needs a field larger than F_{2^k_max}.
AlgebraicPointSet solve_system(const std::vector<Poly>& polys, unsigned k_max = kDefaultKMax);

/// NotSquarefree if the curve has a repeated factor.
AlgebraicPointSet singular_points(const Poly& curve, unsigned k_max = kDefaultKMax);

/// CommonComponent for curves sharing a factor; BezoutMismatch when every
/// intersection is transversal but the count differs from the degree product.
AlgebraicPointSet intersection_points(const Poly& c1, const Poly& c2, unsigned k_max = kDefaultKMax);

/// NotOnCurve unless p lies on both curves.
bool transversal_at(const Poly& c1, const Poly& c2, const ProjPoint& p);

/// Some point of f = 0, searched over F_{2^e} for e up to max_degree.
std::optional<ProjPoint> point_on_curve(const Poly& f, unsigned max_degree = 6);

/// Gradient (f_x, f_y, f_z) at p, in the common field.
std::array<FieldElem, 3> gradient_at(const Poly& f, const ProjPoint& p);

/// True iff the total space has no singular point on the fiber over p.
/// FiberNotDegenerate for a smooth fiber.
bool smooth_along_fiber(const ConicBundleSpec& s, const ProjPoint& p);

/// Nondegeneracy of the quadratic part of eq at q (a node in any number of
/// variables). NotSingularHere if eq or its gradient does not vanish at q.
bool ordinary_node_check(const Poly& eq, std::span<const FieldElem> q);

/// Rank of the alternating form of the node's quadratic part and whether the
/// radical carries a nonzero value of Q (reported in certificates).
struct NodeAnalysis {
  bool nondegenerate = false;
  int alternating_rank = 0;
  int variables = 0;
};
NodeAnalysis analyze_node(const Poly& eq, std::span<const FieldElem> q);

}  // namespace cbundle
