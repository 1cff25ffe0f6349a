#include "cbundle/factor.hpp"

#include <algorithm>
#include <numeric>

namespace cbundle {

bool canonical_less(const Poly& a, const Poly& b) {
  if (a.total_degree() != b.total_degree()) return a.total_degree() < b.total_degree();
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  for (std::size_t i = 0; i < std::min(ta.size(), tb.size()); ++i) {
    if (ta[i].mono != tb[i].mono) return grlex_greater(ta[i].mono, tb[i].mono);
    if (ta[i].coeff != tb[i].coeff) return ta[i].coeff < tb[i].coeff;
  }
  return ta.size() < tb.size();
}

Poly Factorization::expand(const Vars& vars) const {
  Poly r = Poly::constant(unit.ctx(), vars, unit.bits());
  for (const auto& [p, m] : factors) r = r * pow(p, static_cast<unsigned>(m));
  return r;
}

namespace {

using FactorList = std::vector<std::pair<Poly, int>>;

struct Axes {
  std::size_t u;  // main variable
  std::size_t v;  // coefficient variable
};

// p as sum_i c[i](v) u^i.
std::vector<UPoly> dense_in_u(const Poly& p, Axes ax) {
  const int du = p.degree_in(ax.u);
  std::vector<std::vector<uint64_t>> c(static_cast<std::size_t>(std::max(du, -1) + 1));
  for (const auto& t : p.terms()) {
    auto& row = c[t.mono.exp[ax.u]];
    const std::size_t j = t.mono.exp[ax.v];
    if (row.size() <= j) row.resize(j + 1, 0);
    row[j] = t.coeff;
  }
  std::vector<UPoly> out;
  out.reserve(c.size());
  for (auto& row : c) out.emplace_back(p.ctx(), std::move(row));
  return out;
}

Poly from_dense_u(const std::vector<UPoly>& d, const FieldCtx& ctx, const Vars& vars, Axes ax) {
  std::vector<Poly::Term> t;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d[i].coeffs().size(); ++j) {
      if (!d[i].coeffs()[j]) continue;
      Monomial m;
      m.exp[ax.u] = static_cast<uint16_t>(i);
      m.exp[ax.v] = static_cast<uint16_t>(j);
      t.push_back({m, d[i].coeffs()[j]});
    }
  return Poly::from_terms(ctx, vars, std::move(t));
}

void trim(std::vector<UPoly>& d) {
  while (!d.empty() && d.back().is_zero()) d.pop_back();
}

int degree(const std::vector<UPoly>& d) { return static_cast<int>(d.size()) - 1; }

UPoly content(const std::vector<UPoly>& d, const FieldCtx& ctx) {
  UPoly g(ctx);
  for (const auto& c : d) {
    g = gcd(g, c);
    if (g.is_one()) break;
  }
  return g;
}

std::vector<UPoly> primitive(std::vector<UPoly> d, const FieldCtx& ctx) {
  const UPoly c = content(d, ctx);
  if (c.degree() <= 0) {
    if (!d.empty() && !c.is_zero()) {
      // Normalize the leading coefficient's lead to one for stability.
      const uint64_t s = ctx.inv(d.back().lead());
      for (auto& x : d) x = x.scaled(s);
    }
    return d;
  }
  for (auto& x : d) x = x / c;
  return d;
}

std::vector<UPoly> pseudo_rem(std::vector<UPoly> a, const std::vector<UPoly>& b) {
  const int db = degree(b);
  const UPoly& lb = b.back();
  while (degree(a) >= db) {
    const UPoly la = a.back();
    const std::size_t s = static_cast<std::size_t>(degree(a) - db);
    for (auto& x : a) x = x * lb;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + s] += la * b[i];
    trim(a);
  }
  return a;
}

Poly univariate_gcd_poly(const Poly& f, const Poly& g, std::size_t var) {
  return from_upoly(gcd(to_upoly(f, var), to_upoly(g, var)), f.vars(), var);
}

std::vector<std::size_t> joint_support(const Poly& f, const Poly& g) {
  std::vector<std::size_t> s = f.support();
  for (auto i : g.support())
    if (std::find(s.begin(), s.end(), i) == s.end()) s.push_back(i);
  std::sort(s.begin(), s.end());
  return s;
}


void require_bivariate(const std::vector<std::size_t>& s, const char* what) {
  if (s.size() > 2) throw Error(ErrorCode::TooManyVariables, std::string(what) + ": more than two variables");
}

void sort_factors(FactorList& f) {
  std::sort(f.begin(), f.end(), [](const auto& a, const auto& b) {
    if (canonical_less(a.first, b.first)) return true;
    if (canonical_less(b.first, a.first)) return false;
    return a.second < b.second;
  });
  // Merge equal factors coming from different branches.
  FactorList merged;
  for (auto& e : f) {
    if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
    else merged.push_back(std::move(e));
  }
  f = std::move(merged);
}

void push_univariate(const Poly& p, std::size_t var, int mult, FactorList& out) {
  for (auto& [q, m] : factor(to_upoly(p, var))) out.emplace_back(from_upoly(q, p.vars(), var), m * mult);
}

// ---- Hensel lifting in power series over v ----

// Truncated series sum_j v^j s[j](u).
using Series = std::vector<UPoly>;

Series series_mul(const Series& a, const Series& b, std::size_t n, const FieldCtx& F) {
  Series r(n, UPoly(F));
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size() && i + j < n; ++j)
      if (!b[j].is_zero()) r[i + j] += a[i] * b[j];
  }
  return r;
}

// Coefficients of p in powers of v, truncated to n terms, as polynomials in u.
Series series_of(const Poly& p, Axes ax, std::size_t n) {
  std::vector<std::vector<uint64_t>> c(n);
  for (const auto& t : p.terms()) {
    const std::size_t j = t.mono.exp[ax.v];
    if (j >= n) continue;
    const std::size_t i = t.mono.exp[ax.u];
    if (c[j].size() <= i) c[j].resize(i + 1, 0);
    c[j][i] = t.coeff;
  }
  Series s;
  for (auto& row : c) s.emplace_back(p.ctx(), std::move(row));
  return s;
}

Poly poly_of(const Series& s, const FieldCtx& F, const Vars& vars, Axes ax) {
  std::vector<Poly::Term> t;
  for (std::size_t j = 0; j < s.size(); ++j)
    for (std::size_t i = 0; i < s[j].coeffs().size(); ++i) {
      if (!s[j].coeffs()[i]) continue;
      Monomial m;
      m.exp[ax.u] = static_cast<uint16_t>(i);
      m.exp[ax.v] = static_cast<uint16_t>(j);
      t.push_back({m, s[j].coeffs()[i]});
    }
  return Poly::from_terms(F, vars, std::move(t));
}

Series scalar_series(const UPoly& c, std::size_t n, const FieldCtx& F) {
  Series s(n, UPoly(F));
  for (std::size_t j = 0; j < n && j < c.coeffs().size(); ++j) s[j] = UPoly::constant(F, c.coeffs()[j]);
  return s;
}

UPoly inverse_series(const UPoly& c, std::size_t n) {
  const FieldCtx& F = c.ctx();
  std::vector<uint64_t> inv(n, 0);
  const uint64_t c0inv = F.inv(c.coeff(0));
  inv[0] = c0inv;
  for (std::size_t j = 1; j < n; ++j) {
    uint64_t acc = 0;
    for (std::size_t i = 1; i <= j; ++i) acc ^= F.mul(c.coeff(i), inv[j - i]);
    inv[j] = F.mul(acc, c0inv);
  }
  return UPoly(F, std::move(inv));
}

// Monic lifts H_i of the factors h_i of G(u, 0) / lc(0), modulo v^n.
std::vector<Series> hensel_lift(const Poly& G, Axes ax, const std::vector<UPoly>& h, std::size_t n) {
  const FieldCtx& F = G.ctx();
  const auto dense = dense_in_u(G, ax);
  const UPoly lc_inv = inverse_series(dense.back(), n);
  const Series target = series_mul(scalar_series(lc_inv, n, F), series_of(G, ax, n), n, F);
  const std::size_t r = h.size();
  std::vector<UPoly> s(r, UPoly(F));
  for (std::size_t i = 0; i < r; ++i) {
    UPoly rest = UPoly::constant(F, 1);
    for (std::size_t k = 0; k < r; ++k)
      if (k != i) rest = (rest * h[k]) % h[i];
    s[i] = xgcd(rest, h[i]).s;
  }
  std::vector<Series> H(r, Series(n, UPoly(F)));
  for (std::size_t i = 0; i < r; ++i) H[i][0] = h[i];
  for (std::size_t j = 1; j < n; ++j) {
    Series prod = scalar_series(UPoly::constant(F, 1), j + 1, F);
    for (std::size_t i = 0; i < r; ++i) prod = series_mul(prod, H[i], j + 1, F);
    const UPoly e = target[j] - prod[j];
    if (e.is_zero()) continue;
    for (std::size_t i = 0; i < r; ++i) H[i][j] = (e * s[i]) % h[i];
  }
  return H;
}

struct Specialization {
  const FieldCtx* field;
  uint64_t point;
  std::vector<UPoly> local;  // monic irreducible factors of G(u, point)
};

Specialization choose_specialization(const Poly& G, Axes ax, const FactorOptions& opt) {
  const FieldCtx& F = G.ctx();
  const auto dense = dense_in_u(G, ax);
  unsigned attempts = 0;
  for (unsigned r = 1; F.degree() * r <= FieldCtx::kMaxDegree; ++r) {
    const FieldCtx& E = field_new(F.degree() * r);
    std::vector<UPoly> de;
    for (const auto& c : dense) de.push_back(embed(c, E));
    std::optional<Specialization> best;
    unsigned good = 0;
    const uint64_t count = E.degree() >= 63 ? ~uint64_t{0} : (uint64_t{1} << E.degree());
    for (uint64_t a = 0; a < count; ++a) {
      if (r > 1 && E.subfield_degree(a) != E.degree()) continue;
      if (++attempts > opt.specialization_budget)
        throw Error(ErrorCode::UnluckySpecializationExhausted, G.to_string());
      if (de.back().eval(a) == 0) continue;
      std::vector<uint64_t> g0(de.size());
      for (std::size_t i = 0; i < de.size(); ++i) g0[i] = de[i].eval(a);
      const UPoly g(E, std::move(g0));
      if (gcd(g, g.derivative()).degree() > 0) continue;
      std::vector<UPoly> local;
      for (auto& [p, m] : factor(g)) local.push_back(p);
      if (!best || local.size() < best->local.size()) best = Specialization{&E, a, std::move(local)};
      if (++good >= 3 || best->local.size() == 1) break;
    }
    if (best) return *best;
  }
  throw Error(ErrorCode::UnluckySpecializationExhausted, G.to_string());
}

Poly shift_v(const Poly& p, Axes ax, const FieldElem& a) {
  const Poly v = Poly::variable(a.ctx(), p.vars(), (*p.vars())[ax.v]);
  return substitute(p, {{(*p.vars())[ax.v], v + Poly::constant(p.vars(), a)}});
}

Poly primitive_part_u(const Poly& p, Axes ax) {
  auto d = dense_in_u(p, ax);
  return from_dense_u(primitive(std::move(d), p.ctx()), p.ctx(), p.vars(), ax);
}

// G: content-free in the u direction, separable in u, degree in u at least 2.
void factor_separable(const Poly& G, Axes ax, int mult, const FactorOptions& opt, FactorList& out) {
  const FieldCtx& F = G.ctx();
  Specialization sp = choose_specialization(G, ax, opt);
  const FieldCtx& E = *sp.field;
  if (sp.local.size() == 1) {
    out.emplace_back(G.monic(), mult);
    return;
  }
  const FieldElem a(E, sp.point);
  Poly cur = shift_v(embed(G, E), ax, a);
  const auto dense = dense_in_u(cur, ax);
  const std::size_t n = static_cast<std::size_t>(cur.degree_in(ax.v) + dense.back().degree() + 1);
  const std::vector<Series> H = hensel_lift(cur, ax, sp.local, n);

  std::vector<std::size_t> remaining(H.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::size_t size = 1;
  while (2 * size <= remaining.size()) {
    bool found = false;
    std::vector<std::size_t> pick(size);
    std::iota(pick.begin(), pick.end(), 0);
    const UPoly lc = dense_in_u(cur, ax).back();
    for (;;) {
      Series cand = scalar_series(lc, n, E);
      for (auto idx : pick) cand = series_mul(cand, H[remaining[idx]], n, E);
      Poly c = primitive_part_u(poly_of(cand, E, cur.vars(), ax), ax);
      if (auto q = try_exact_div(cur, c)) {
        if (auto rational = descend(shift_v(c, ax, a).monic(), F)) {
          out.emplace_back(*rational, mult);
          cur = *q;
          std::vector<std::size_t> rest;
          for (std::size_t i = 0; i < remaining.size(); ++i)
            if (std::find(pick.begin(), pick.end(), i) == pick.end()) rest.push_back(remaining[i]);
          remaining = std::move(rest);
          found = true;
          break;
        }
      }
      // Next combination in lexicographic order.
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == remaining.size() - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (!found) ++size;
  }
  if (!cur.is_constant()) {
    auto rational = descend(shift_v(cur, ax, a).monic(), F);
    if (!rational) throw Error(ErrorCode::FactorizationMismatch, "cofactor is not rational: " + cur.to_string());
    out.emplace_back(*rational, mult);
  }
}

void factor_squarefree(Poly s, int mult, const FactorOptions& opt, FactorList& out) {
  if (s.is_constant()) return;
  const auto sup = s.support();
  require_bivariate(sup, "factor");
  if (sup.size() == 1) {
    push_univariate(s, sup[0], mult, out);
    return;
  }
  Axes ax{sup[0], sup[1]};
  if (partial_derivative(s, ax.u).is_zero()) std::swap(ax.u, ax.v);
  const UPoly cont = content(dense_in_u(s, ax), s.ctx());
  if (cont.degree() > 0) {
    const Poly c = from_upoly(cont, s.vars(), ax.v);
    push_univariate(c, ax.v, mult, out);
    s = exact_div(s, c);
  }
  if (s.is_constant()) return;
  // Factors whose u-derivative vanishes are inseparable in u; split them off.
  const Poly g = bivariate_gcd(s, partial_derivative(s, ax.u));
  if (!g.is_constant()) {
    factor_squarefree(g, mult, opt, out);
    s = exact_div(s, g);
  }
  if (s.is_constant()) return;
  if (s.degree_in(ax.v) <= 0 || s.degree_in(ax.u) <= 0) {
    factor_squarefree(s, mult, opt, out);
    return;
  }
  if (s.degree_in(ax.u) == 1) {
    out.emplace_back(s.monic(), mult);
    return;
  }
  factor_separable(s, ax, mult, opt, out);
}

// Squarefree decomposition over F[u, v] (characteristic-2 aware).
void squarefree_parts(const Poly& f, int mult, FactorList& out) {
  if (f.is_constant()) return;
  std::optional<std::size_t> var;
  for (auto i : f.support())
    if (!partial_derivative(f, i).is_zero()) {
      var = i;
      break;
    }
  if (!var) {
    squarefree_parts(*square_root(f), 2 * mult, out);
    return;
  }
  Poly c = bivariate_gcd(f, partial_derivative(f, *var));
  Poly w = exact_div(f, c);
  int i = 1;
  while (!w.is_constant()) {
    Poly y = bivariate_gcd(w, c);
    Poly z = exact_div(w, y);
    if (!z.is_constant()) out.emplace_back(z.monic(), i * mult);
    ++i;
    w = y;
    c = exact_div(c, y);
  }
  squarefree_parts(c, mult, out);
}

}  // namespace

Poly bivariate_gcd(const Poly& f, const Poly& g) {
  if (&f.ctx() != &g.ctx() || !same_vars(f.vars(), g.vars())) throw Error(ErrorCode::ContextMismatch, "gcd");
  if (f.is_zero()) return g.monic();
  if (g.is_zero()) return f.monic();
  const auto sup = joint_support(f, g);
  require_bivariate(sup, "gcd");
  if (sup.empty()) return Poly::constant(f.ctx(), f.vars(), 1);
  if (sup.size() == 1) return univariate_gcd_poly(f, g, sup[0]);
  const Axes ax{sup[0], sup[1]};
  const FieldCtx& F = f.ctx();
  auto a = dense_in_u(f, ax);
  auto b = dense_in_u(g, ax);
  const UPoly c = gcd(content(a, F), content(b, F));
  a = primitive(std::move(a), F);
  b = primitive(std::move(b), F);
  if (degree(a) < degree(b)) std::swap(a, b);
  while (!b.empty()) {
    if (degree(b) == 0) {
      a = {UPoly::constant(F, 1)};
      break;
    }
    auto r = pseudo_rem(a, b);
    a = std::move(b);
    b = r.empty() ? std::move(r) : primitive(std::move(r), F);
  }
  for (auto& x : a) x = x * c;
  return from_dense_u(a, F, f.vars(), ax).monic();
}

Poly homogeneous_gcd(const Poly& f, const Poly& g) {
  if (f.is_zero()) return g.monic();
  if (g.is_zero()) return f.monic();
  if (f.nvars() != 3) throw Error(ErrorCode::InvalidInput, "homogeneous_gcd expects three variables");
  const std::size_t w = 2;
  auto low = [&](const Poly& p) {
    int c = p.degree_in(w);
    for (const auto& t : p.terms()) c = std::min(c, int{t.mono.exp[w]});
    return c;
  };
  const int c = std::min(low(f), low(g));
  const std::string& name = (*f.vars())[w];
  const Poly h = bivariate_gcd(substitute(f, name, FieldElem::one(f.ctx())), substitute(g, name, FieldElem::one(g.ctx())));
  Monomial m;
  m.exp[w] = static_cast<uint16_t>(c);
  return (homogenize(h, w, h.total_degree()) * Poly::monomial(f.ctx(), f.vars(), m)).monic();
}

Factorization univariate_factor(const Poly& f) {
  if (f.is_zero()) throw Error(ErrorCode::InvalidInput, "factor of zero");
  Factorization out{f.leading_coeff(), {}};
  const auto sup = f.support();
  if (sup.size() > 1) throw Error(ErrorCode::TooManyVariables, "univariate_factor: " + f.to_string());
  if (sup.empty()) return out;
  push_univariate(f, sup[0], 1, out.factors);
  sort_factors(out.factors);
  return out;
}

Factorization bivariate_factor(const Poly& f, const FactorOptions& opt) {
  if (f.is_zero()) throw Error(ErrorCode::InvalidInput, "factor of zero");
  Factorization out{f.leading_coeff(), {}};
  const auto sup = f.support();
  require_bivariate(sup, "bivariate_factor");
  if (sup.size() <= 1) return univariate_factor(f);
  FactorList parts;
  squarefree_parts(f.monic(), 1, parts);
  for (const auto& [p, m] : parts) factor_squarefree(p, m, opt, out.factors);
  sort_factors(out.factors);
  return out;
}

Factorization homogeneous_factor(const Poly& f, const FactorOptions& opt) {
  if (f.is_zero()) throw Error(ErrorCode::InvalidInput, "factor of zero");
  if (!f.homogeneity().degree) throw Error(ErrorCode::InvalidInput, "not homogeneous: " + f.to_string());
  if (f.nvars() != 3) throw Error(ErrorCode::InvalidInput, "expected three variables");
  Factorization out{f.leading_coeff(), {}};
  const std::size_t w = 2;
  int c = f.degree_in(w);
  for (const auto& t : f.terms()) c = std::min(c, int{t.mono.exp[w]});
  Poly rest = f;
  if (c > 0) {
    Monomial m;
    m.exp[w] = static_cast<uint16_t>(c);
    rest = exact_div(f, Poly::monomial(f.ctx(), f.vars(), m));
    out.factors.emplace_back(Poly::variable(f.ctx(), f.vars(), (*f.vars())[w]), c);
  }
  if (!rest.is_constant()) {
    const Poly affine = substitute(rest, (*f.vars())[w], FieldElem::one(f.ctx()));
    for (const auto& [p, m] : bivariate_factor(affine, opt).factors)
      out.factors.emplace_back(homogenize(p, w, p.total_degree()).monic(), m);
  }
  sort_factors(out.factors);
  return out;
}

bool is_absolutely_irreducible(const Poly& f, const FactorOptions& opt) {
  if (f.is_constant()) return false;
  const int d = f.total_degree();
  if (d == 1) return true;
  Poly g = f;
  const auto sup = f.support();
  if (sup.size() == 3) {
    if (!f.homogeneity().degree) throw Error(ErrorCode::InvalidInput, "not homogeneous: " + f.to_string());
    // Dehomogenize at a variable that does not divide f.
    std::optional<std::size_t> w;
    for (std::size_t i = f.nvars(); i-- > 0;)
      if (!substitute(f, (*f.vars())[i], FieldElem::zero(f.ctx())).is_zero()) {
        w = i;
        break;
      }
    if (!w) return false;
    g = substitute(f, (*f.vars())[*w], FieldElem::one(f.ctx()));
  } else if (f.homogeneity().degree && sup.size() == 2 && f.nvars() == 3) {
    // A binary form in the plane is a union of lines.
    return false;
  }
  if (g.support().size() > 2) throw Error(ErrorCode::TooManyVariables, f.to_string());
  const unsigned k = f.ctx().degree();
  for (int e = 1; e <= d; ++e) {
    if (k * static_cast<unsigned>(e) > FieldCtx::kMaxDegree)
      throw Error(ErrorCode::ExtensionBound, "absolute irreducibility needs F_2^" + std::to_string(k * e));
    const auto fac = bivariate_factor(embed(g, field_new(k * static_cast<unsigned>(e))), opt);
    if (fac.factors.size() != 1 || fac.factors[0].second != 1) return false;
  }
  return true;
}

}  // namespace cbundle
