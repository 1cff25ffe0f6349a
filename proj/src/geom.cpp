#include "cbundle/geom.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "cbundle/factor.hpp"

namespace cbundle {

bool AlgebraicPointSet::contains(const ProjPoint& p) const {
  return std::any_of(points.begin(), points.end(), [&](const ProjPoint& q) { return q == p; });
}

namespace {

void require_plane_form(const Poly& f, const char* what) {
  if (!same_vars(f.vars(), xyz_vars()))
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": expected a form in x, y, z");
  if (!f.homogeneity().degree && !f.is_zero())
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": not homogeneous: " + f.to_string());
}

// Roots of u over the extensions of its field that stay within k_max.
std::vector<FieldElem> roots_all(const UPoly& u, unsigned k_max, std::vector<int>* degrees) {
  std::vector<FieldElem> out;
  if (u.degree() <= 0) return out;
  const unsigned k = u.ctx().degree();
  for (const auto& [g, mult] : factor(u)) {
    (void)mult;
    const unsigned e = k * static_cast<unsigned>(g.degree());
    if (degrees) degrees->push_back(g.degree());
    if (e > k_max || e > FieldCtx::kMaxDegree)
      throw Error(ErrorCode::ExtensionBound, "a point needs F_{2^" + std::to_string(e) + "} (bound " +
                                                 std::to_string(k_max) + ")");
    const FieldCtx& L = field_new(e);
    for (uint64_t r : roots(embed(g, L))) out.emplace_back(L, r);
  }
  return out;
}

UPoly univariate_in(const Poly& p, std::size_t var) { return to_upoly(p, var); }

// Product of Frobenius conjugates of u down to the subfield F_{2^k}.
UPoly norm_down(const UPoly& u, unsigned k) {
  const FieldCtx& L = u.ctx();
  UPoly acc = u;
  UPoly conj = u;
  for (unsigned i = k; i < L.degree(); i += k) {
    std::vector<uint64_t> c(conj.coeffs());
    for (auto& x : c) x = L.frobenius(x, k);
    conj = UPoly(L, std::move(c));
    acc = acc * conj;
  }
  std::vector<uint64_t> c;
  for (auto x : acc.coeffs()) {
    auto d = descend_bits(x, k, L.degree());
    if (!d) throw Error(ErrorCode::EliminationFailed, "norm did not descend");
    c.push_back(*d);
  }
  return UPoly(field_new(k), std::move(c));
}

// A nonzero univariate polynomial in x vanishing at the x-coordinate of every
// common zero of the affine polynomials (in variables x, y; z absent).
UPoly eliminant(const std::vector<Poly>& aff) {
  const FieldCtx& F = aff[0].ctx();
  UPoly E(F);
  int found = 0;
  for (const auto& a : aff)
    if (a.degree_in(1) == 0) {
      E = gcd(E, univariate_in(a, 0));
      ++found;
    }
  for (std::size_t i = 0; i < aff.size() && found < 3; ++i) {
    if (aff[i].degree_in(1) == 0) continue;
    for (std::size_t j = i + 1; j < aff.size() && found < 3; ++j) {
      if (aff[j].degree_in(1) == 0) continue;
      const Poly r = resultant(aff[i], aff[j], 1);
      if (r.is_zero()) continue;
      E = gcd(E, univariate_in(r, 0));
      ++found;
    }
  }
  if (found) return E;
  // Every pair shares a component in this chart: eliminate between two
  // generic combinations with coefficients in an extension.
  unsigned m = 1;
  while (F.degree() * m < 16 && F.degree() * (m + 1) <= FieldCtx::kMaxDegree) ++m;
  const FieldCtx& L = field_new(F.degree() * m);
  std::mt19937_64 rng(0x5eed);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Poly g1(L, aff[0].vars()), g2(L, aff[0].vars());
    for (const auto& a : aff) {
      g1 += embed(a, L).scaled(rng() & L.mask());
      g2 += embed(a, L).scaled(rng() & L.mask());
    }
    if (g1.degree_in(1) == 0 || g2.degree_in(1) == 0) continue;
    const Poly r = resultant(g1, g2, 1);
    if (!r.is_zero()) return norm_down(univariate_in(r, 0).monic(), F.degree());
  }
  throw Error(ErrorCode::EliminationFailed, "every resultant vanished");
}

}  // namespace

AlgebraicPointSet solve_system(const std::vector<Poly>& input, unsigned k_max) {
  std::vector<Poly> polys;
  unsigned deg = 1;
  for (const auto& p : input) {
    require_plane_form(p, "solve_system");
    if (!p.is_zero()) {
      polys.push_back(p);
      deg = std::lcm(deg, p.ctx().degree());
    }
  }
  if (polys.empty()) throw Error(ErrorCode::PositiveDimensional, "no nonzero equations");
  const FieldCtx& F = field_new(deg);
  for (auto& p : polys) p = embed(p, F);

  AlgebraicPointSet out;
  for (const auto& p : polys)
    if (p.is_constant()) return out;
  Poly g = polys[0];
  for (const auto& p : polys) g = homogeneous_gcd(g, p);
  if (!g.is_constant()) throw Error(ErrorCode::PositiveDimensional, "common component " + g.to_string());

  std::set<ProjPoint> found;
  const FieldElem one = FieldElem::one(F);
  const FieldElem zero = FieldElem::zero(F);

  // Chart z = 1.
  std::vector<Poly> aff;
  bool empty_chart = false;
  for (const auto& p : polys) {
    Poly a = substitute(p, "z", one);
    if (a.is_constant()) empty_chart = true;
    aff.push_back(std::move(a));
  }
  if (!empty_chart) {
    const UPoly E = eliminant(aff);
    for (const FieldElem& x0 : roots_all(E, k_max, &out.eliminant_degrees)) {
      UPoly h(x0.ctx());
      for (const auto& a : aff) h = gcd(h, univariate_in(substitute(a, "x", x0), 1));
      if (h.is_zero()) throw Error(ErrorCode::PositiveDimensional, "vertical common line");
      for (const FieldElem& y0 : roots_all(h, k_max, nullptr)) {
        const FieldCtx& L = y0.ctx();
        found.insert(ProjPoint(L, {embed(x0, L).bits(), y0.bits(), 1}).minimal());
      }
    }
  }

  // Line z = 0: points [x:1:0], then [1:0:0].
  UPoly u(F);
  for (const auto& p : polys) u = gcd(u, univariate_in(substitute(substitute(p, "z", zero), "y", one), 0));
  if (u.is_zero()) throw Error(ErrorCode::PositiveDimensional, "line at infinity is common");
  for (const FieldElem& x0 : roots_all(u, k_max, &out.eliminant_degrees))
    found.insert(ProjPoint(x0.ctx(), {x0.bits(), 1, 0}).minimal());
  const ProjPoint corner(F, {1, 0, 0});
  if (std::all_of(polys.begin(), polys.end(), [&](const Poly& p) { return evaluate_at(p, corner).is_zero(); }))
    found.insert(corner.minimal());

  out.points.assign(found.begin(), found.end());
  out.found = static_cast<int>(out.points.size());
  return out;
}

std::optional<ProjPoint> point_on_curve(const Poly& f, unsigned max_degree) {
  for (unsigned e = 1; e <= max_degree; ++e) {
    const FieldCtx& L = common_field(f.ctx().degree(), e);
    const uint64_t q = uint64_t{1} << L.degree();
    auto test = [&](uint64_t x, uint64_t y, uint64_t z) -> std::optional<ProjPoint> {
      const ProjPoint p(L, {x, y, z});
      if (evaluate_at(f, p).is_zero()) return p.minimal();
      return std::nullopt;
    };
    if (auto p = test(1, 0, 0)) return p;
    for (uint64_t x = 0; x < q; ++x)
      if (auto p = test(x, 1, 0)) return p;
    for (uint64_t x = 0; x < q && q <= 4096; ++x)
      for (uint64_t y = 0; y < q; ++y)
        if (auto p = test(x, y, 1)) return p;
  }
  return std::nullopt;
}

std::array<FieldElem, 3> gradient_at(const Poly& f, const ProjPoint& p) {
  return {evaluate_at(partial_derivative(f, 0), p), evaluate_at(partial_derivative(f, 1), p),
          evaluate_at(partial_derivative(f, 2), p)};
}

AlgebraicPointSet singular_points(const Poly& curve, unsigned k_max) {
  require_plane_form(curve, "singular_points");
  if (curve.is_constant()) throw Error(ErrorCode::InvalidInput, "singular_points: constant curve");
  std::vector<Poly> sys{curve};
  for (std::size_t i = 0; i < 3; ++i) sys.push_back(partial_derivative(curve, i));
  Poly g = curve;
  for (std::size_t i = 1; i < sys.size(); ++i)
    if (!sys[i].is_zero()) g = homogeneous_gcd(g, sys[i]);
  if (!g.is_constant()) throw Error(ErrorCode::NotSquarefree, "repeated factor " + g.to_string());
  return solve_system(sys, k_max);
}

bool transversal_at(const Poly& c1, const Poly& c2, const ProjPoint& p) {
  if (!evaluate_at(c1, p).is_zero() || !evaluate_at(c2, p).is_zero())
    throw Error(ErrorCode::NotOnCurve, p.to_string());
  auto g1 = gradient_at(c1, p);
  auto g2 = gradient_at(c2, p);
  const FieldCtx& L = common_field(g1[0].ctx().degree(), g2[0].ctx().degree());
  for (auto& e : g1) e = embed(e, L);
  for (auto& e : g2) e = embed(e, L);
  // Transversal iff both gradients are nonzero and independent.
  const FieldElem c0 = g1[1] * g2[2] + g1[2] * g2[1];
  const FieldElem c1v = g1[0] * g2[2] + g1[2] * g2[0];
  const FieldElem c2v = g1[0] * g2[1] + g1[1] * g2[0];
  return !(c0.is_zero() && c1v.is_zero() && c2v.is_zero());
}

AlgebraicPointSet intersection_points(const Poly& c1, const Poly& c2, unsigned k_max) {
  require_plane_form(c1, "intersection_points");
  require_plane_form(c2, "intersection_points");
  if (c1.is_zero() || c2.is_zero()) throw Error(ErrorCode::CommonComponent, "zero curve");
  const FieldCtx& F = common_field(c1.ctx().degree(), c2.ctx().degree());
  const Poly f = embed(c1, F), g = embed(c2, F);
  const Poly h = homogeneous_gcd(f, g);
  if (!h.is_constant()) throw Error(ErrorCode::CommonComponent, h.to_string());
  AlgebraicPointSet out = solve_system({f, g}, k_max);
  const bool all_transversal =
      std::all_of(out.points.begin(), out.points.end(), [&](const ProjPoint& p) { return transversal_at(f, g, p); });
  if (all_transversal) {
    out.kind = AlgebraicPointSet::Kind::BezoutCount;
    out.expected = f.total_degree() * g.total_degree();
    if (out.found != out.expected)
      throw Error(ErrorCode::BezoutMismatch, "found " + std::to_string(out.found) + " transversal points, expected " +
                                                 std::to_string(out.expected));
  }
  return out;
}

namespace {

// Value of the quadratic form sum d_ij u_i u_j restricted to s*P + t*R, as a
// binary form in (s, t).
Poly restrict_to_line(const std::array<FieldElem, 6>& d, const std::array<FieldElem, 3>& P,
                      const std::array<FieldElem, 3>& R, const Vars& st) {
  const FieldCtx& L = P[0].ctx();
  FieldElem ss = FieldElem::zero(L), tt = ss, st_c = ss;
  for (Entry e : kEntries) {
    auto [i, j] = entry_indices(e);
    const FieldElem& c = d[static_cast<std::size_t>(e)];
    ss += c * P[i] * P[j];
    tt += c * R[i] * R[j];
    if (i != j) st_c += c * (P[i] * R[j] + P[j] * R[i]);
    // Diagonal cross terms vanish: 2 P_i R_i = 0.
  }
  Monomial m_ss, m_tt, m_st;
  m_ss.exp[0] = 2;
  m_tt.exp[1] = 2;
  m_st.exp[0] = 1;
  m_st.exp[1] = 1;
  return Poly::from_terms(L, st, {{m_ss, ss.bits()}, {m_tt, tt.bits()}, {m_st, st_c.bits()}});
}

}  // namespace

bool smooth_along_fiber(const ConicBundleSpec& s, const ProjPoint& p0) {
  const FiberType type = classify_fiber(s, p0);
  if (type == FiberType::Smooth) throw Error(ErrorCode::FiberNotDegenerate, p0.to_string());
  if (type == FiberType::NotConic) return false;

  const FieldCtx& L = common_field(s.ctx->degree(), p0.ctx().degree());
  const ProjPoint p = p0.embedded(L);
  std::vector<FieldElem> v = section_values(s, p);
  for (auto& e : v) e = embed(e, L);

  // Base chart: the first nonzero coordinate of p is 1.
  std::size_t w = 0;
  while (p.bits(w) == 0) ++w;
  const FieldElem zero = FieldElem::zero(L);
  std::array<FieldElem, 6> zeros{zero, zero, zero, zero, zero, zero};
  std::array<std::array<FieldElem, 6>, 2> dq{zeros, zeros};
  int slot = 0;
  for (std::size_t u = 0; u < 3; ++u) {
    if (u == w) continue;
    for (Entry e : kEntries) {
      const FieldElem val = evaluate_at(partial_derivative(s.s(e), u), p);
      dq[static_cast<std::size_t>(slot)][static_cast<std::size_t>(e)] = embed(val, L);
    }
    ++slot;
  }
  auto form_at = [&](const std::array<FieldElem, 6>& d, const std::array<FieldElem, 3>& a) {
    FieldElem acc = FieldElem::zero(L);
    for (Entry e : kEntries) {
      auto [i, j] = entry_indices(e);
      acc += d[static_cast<std::size_t>(e)] * a[i] * a[j];
    }
    return acc;
  };

  if (type == FiberType::Cross) {
    // The fiber gradient vanishes only at the vertex n, and Q(n) = Δ(p) = 0.
    const auto n = cross_vertex(v);
    return !(form_at(dq[0], n).is_zero() && form_at(dq[1], n).is_zero());
  }

  // Double line l^2 with l = (sqrt s_aa, sqrt s_bb, sqrt s_cc)(p); singular
  // points are the common zeros on l of the two base partials.
  const std::array<FieldElem, 3> l = {v[0].sqrt(), v[3].sqrt(), v[5].sqrt()};
  std::size_t i = 0;
  while (l[i].is_zero()) ++i;
  const std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
  std::array<FieldElem, 3> P{zero, zero, zero}, R{zero, zero, zero};
  P[i] = l[j];
  P[j] = l[i];
  R[i] = l[k];
  R[k] = l[i];
  static const Vars st = make_vars({"s", "t"});
  const Poly f1 = restrict_to_line(dq[0], P, R, st);
  const Poly f2 = restrict_to_line(dq[1], P, R, st);
  if (f1.is_zero() || f2.is_zero()) return false;
  return binary_gcd(f1, f2).is_constant();
}

namespace {

// Rank and (when one-dimensional) a kernel vector of a symmetric matrix.
struct KernelInfo {
  int rank;
  std::vector<uint64_t> kernel_vector;
};

KernelInfo kernel_of(const FieldCtx& L, std::vector<std::vector<uint64_t>> a) {
  const std::size_t n = a.size();
  std::vector<int> pivot_col;
  std::size_t row = 0;
  std::vector<bool> is_pivot(n, false);
  for (std::size_t col = 0; col < n && row < n; ++col) {
    std::size_t r = row;
    while (r < n && a[r][col] == 0) ++r;
    if (r == n) continue;
    std::swap(a[r], a[row]);
    const uint64_t inv = L.inv(a[row][col]);
    for (auto& x : a[row]) x = L.mul(x, inv);
    for (std::size_t r2 = 0; r2 < n; ++r2) {
      if (r2 == row || a[r2][col] == 0) continue;
      const uint64_t f = a[r2][col];
      for (std::size_t c = 0; c < n; ++c) a[r2][c] ^= L.mul(f, a[row][c]);
    }
    pivot_col.push_back(static_cast<int>(col));
    is_pivot[col] = true;
    ++row;
  }
  KernelInfo info{static_cast<int>(row), {}};
  if (info.rank + 1 == static_cast<int>(n)) {
    std::size_t free = 0;
    while (is_pivot[free]) ++free;
    info.kernel_vector.assign(n, 0);
    info.kernel_vector[free] = 1;
    for (std::size_t r = 0; r < pivot_col.size(); ++r)
      info.kernel_vector[static_cast<std::size_t>(pivot_col[r])] = a[r][free];
  }
  return info;
}

}  // namespace

NodeAnalysis analyze_node(const Poly& eq, std::span<const FieldElem> q) {
  const std::size_t n = eq.nvars();
  if (q.size() != n) throw Error(ErrorCode::InvalidInput, "node point has the wrong dimension");
  unsigned deg = eq.ctx().degree();
  for (const auto& c : q) deg = std::lcm(deg, c.ctx().degree());
  if (deg > FieldCtx::kMaxDegree) throw Error(ErrorCode::ExtensionBound, "node field");
  const FieldCtx& L = field_new(deg);
  std::vector<FieldElem> pt;
  for (const auto& c : q) pt.push_back(embed(c, L));
  const Poly f = embed(eq, L);
  if (!evaluate(f, pt).is_zero()) throw Error(ErrorCode::NotSingularHere, "equation does not vanish");
  for (std::size_t i = 0; i < n; ++i)
    if (!evaluate(partial_derivative(f, i), pt).is_zero())
      throw Error(ErrorCode::NotSingularHere, "gradient does not vanish");
  std::vector<Poly> images;
  for (std::size_t i = 0; i < n; ++i)
    images.push_back(Poly::variable(L, f.vars(), (*f.vars())[i]) + Poly::constant(f.vars(), pt[i]));
  const Poly shifted = compose(f, images);

  std::vector<std::vector<uint64_t>> B(n, std::vector<uint64_t>(n, 0));
  std::vector<uint64_t> diag(n, 0);
  for (const auto& t : shifted.terms()) {
    if (t.mono.total() != 2) continue;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      for (int e = 0; e < t.mono.exp[i]; ++e) idx.push_back(i);
    if (idx[0] == idx[1]) {
      diag[idx[0]] = t.coeff;
    } else {
      B[idx[0]][idx[1]] = t.coeff;
      B[idx[1]][idx[0]] = t.coeff;
    }
  }
  NodeAnalysis out;
  out.variables = static_cast<int>(n);
  const KernelInfo k = kernel_of(L, B);
  out.alternating_rank = k.rank;
  if (k.rank == static_cast<int>(n)) {
    out.nondegenerate = true;
  } else if (!k.kernel_vector.empty()) {
    // Q(r) for the radical vector r (cross terms vanish on the radical).
    uint64_t val = 0;
    for (std::size_t i = 0; i < n; ++i) val ^= L.mul(diag[i], L.sqr(k.kernel_vector[i]));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        val ^= L.mul(B[i][j], L.mul(k.kernel_vector[i], k.kernel_vector[j]));
    out.nondegenerate = val != 0;
  }
  return out;
}

bool ordinary_node_check(const Poly& eq, std::span<const FieldElem> q) { return analyze_node(eq, q).nondegenerate; }

}  // namespace cbundle
