#include "cbundle/amcert.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <random>
#include <thread>

#include "cbundle/factor.hpp"
#include "cbundle/spec_io.hpp"

namespace cbundle {

using nlohmann::json;

std::string am_status_name(AmStatus s) {
  switch (s) {
    case AmStatus::DoubleLineWitness: return "DoubleLineWitness";
    case AmStatus::CrossesWithNonProductWitness: return "CrossesWithNonProductWitness";
    case AmStatus::NotCertified: return "NotCertified";
  }
  return "?";
}

// ---- components ----

FactorList component_factorization(const ConicBundleSpec& s, const std::optional<std::vector<Poly>>& claimed) {
  const Poly delta = discriminant(s);
  if (delta.is_zero()) throw Error(ErrorCode::NotGenericallySmooth, "discriminant vanishes identically");
  FactorList out;
  if (!claimed) {
    for (const auto& [f, mult] : homogeneous_factor(delta).factors) {
      if (!is_absolutely_irreducible(f)) throw Error(ErrorCode::NotAbsolutelyIrreducible, f.to_string());
      out.emplace_back(f, mult);
    }
    return out;
  }
  Poly prod = Poly::constant(*s.ctx, xyz_vars(), 1);
  for (const auto& f : *claimed) {
    if (&f.ctx() != s.ctx) throw Error(ErrorCode::ContextMismatch, "claimed factor over another field");
    if (f.is_constant() || !f.homogeneity().degree)
      throw Error(ErrorCode::FactorizationMismatch, "claimed factor is not a nonconstant form: " + f.to_string());
    prod = prod * f;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first.monic() == f.monic(); });
    if (it == out.end())
      out.emplace_back(f, 1);
    else
      ++it->second;
  }
  const FieldElem scale = delta.leading_coeff() / prod.leading_coeff();
  if (prod.scaled(scale.bits()) != delta)
    throw Error(ErrorCode::FactorizationMismatch, "product of claimed factors is " + prod.to_string() +
                                                      ", discriminant is " + delta.to_string());
  for (const auto& [f, mult] : out) {
    (void)mult;
    if (!is_absolutely_irreducible(f)) throw Error(ErrorCode::NotAbsolutelyIrreducible, f.to_string());
  }
  return out;
}

namespace {

std::vector<Poly> nonzero_sigma(const ConicBundleSpec& s) {
  std::vector<Poly> out;
  for (const auto& g : sigma_generators(s))
    if (!g.is_zero()) out.push_back(g);
  return out;
}

bool in_sigma(const ConicBundleSpec& s, const ProjPoint& p) {
  for (const auto& g : sigma_generators(s))
    if (!evaluate_at(g, p).is_zero()) return false;
  return true;
}

bool contained_in_sigma(const ConicBundleSpec& s, const Poly& d) {
  for (const auto& g : sigma_generators(s))
    if (!g.is_zero() && !try_exact_div(g, d)) return false;
  return true;
}

}  // namespace

std::optional<ProjPoint> nonproduct_witness(const ConicBundleSpec& s, const Poly& d, unsigned max_degree) {
  if (contained_in_sigma(s, d)) throw Error(ErrorCode::InvalidInput, "component lies in the double-line locus");
  const unsigned base = s.ctx->degree();
  const std::array<Poly, 3> grad = {partial_derivative(d, 0), partial_derivative(d, 1), partial_derivative(d, 2)};
  for (unsigned k = base; k <= max_degree; k += base) {
    const FieldCtx& L = field_new(k);
    const Poly dl = embed(d, L);
    std::vector<Poly> sec;
    for (const auto& p : s.sections) sec.push_back(embed(p, L));
    const uint64_t q = uint64_t{1} << k;
    auto examine = [&](std::array<uint64_t, 3> c) -> std::optional<ProjPoint> {
      const std::array<FieldElem, 3> pt = {FieldElem(L, c[0]), FieldElem(L, c[1]), FieldElem(L, c[2])};
      if (!evaluate(dl, pt).is_zero()) return std::nullopt;
      const ProjPoint p(L, c);
      // Residue field F(p) is L exactly; smaller ones were scanned already.
      if (std::lcm(p.minimal().ctx().degree(), base) != k) return std::nullopt;
      bool smooth = false;
      for (const auto& g : grad) smooth = smooth || !evaluate(embed(g, L), pt).is_zero();
      if (!smooth) return std::nullopt;
      std::vector<FieldElem> v;
      for (const auto& f : sec) v.push_back(evaluate(f, pt));
      if (v[1].is_zero() && v[2].is_zero() && v[4].is_zero()) return std::nullopt;
      // The line u_i = 0 misses the vertex; the cross cuts it in the roots
      // of s_jj u^2 + s_jk u w + s_kk w^2.
      const auto n = cross_vertex(v);
      std::size_t i = 0;
      while (n[i].is_zero()) ++i;
      const int j = static_cast<int>((i + 1) % 3), kk = static_cast<int>((i + 2) % 3);
      const FieldElem a = v[static_cast<std::size_t>(entry_of(j, j))];
      const FieldElem b = v[static_cast<std::size_t>(entry_of(j, kk))];
      const FieldElem c2 = v[static_cast<std::size_t>(entry_of(kk, kk))];
      if (b.is_zero()) return std::nullopt;
      if ((a * c2 / b.square()).trace() == 1) return p.minimal();
      return std::nullopt;
    };
    if (auto w = examine({1, 0, 0})) return w;
    for (uint64_t x = 0; x < q; ++x)
      if (auto w = examine({x, 1, 0})) return w;
    for (uint64_t x = 0; x < q; ++x)
      for (uint64_t y = 0; y < q; ++y)
        if (auto w = examine({x, y, 1})) return w;
  }
  return std::nullopt;
}

ComponentAnalysis am_component_check(const ConicBundleSpec& s, const Poly& d, const CriterionOptions& opt) {
  if (!try_exact_div(discriminant(s), d)) throw Error(ErrorCode::NotAComponent, d.to_string());
  ComponentAnalysis a{d, AmStatus::NotCertified, std::nullopt, false, {}, {}, false};
  if (contained_in_sigma(s, d)) {
    a.inside_sigma = true;
    a.witness = point_on_curve(d, opt.witness_degree);
    if (a.witness) a.status = AmStatus::DoubleLineWitness;
  } else {
    std::vector<Poly> sys{d};
    for (auto& g : nonzero_sigma(s)) sys.push_back(g);
    a.sigma_points = solve_system(sys, opt.k_max).points;
    if (!a.sigma_points.empty()) {
      a.status = AmStatus::DoubleLineWitness;
      a.witness = a.sigma_points.front();
    } else if (auto w = nonproduct_witness(s, d, std::min(opt.witness_degree, opt.k_max))) {
      a.status = AmStatus::CrossesWithNonProductWitness;
      a.witness = w;
    }
  }
  a.singular_points = singular_points(d, opt.k_max).points;
  a.sing_in_sigma = std::all_of(a.singular_points.begin(), a.singular_points.end(),
                                [&](const ProjPoint& p) { return in_sigma(s, p); });
  return a;
}

// ---- certificates ----

namespace {

json point_json(const ProjPoint& p) { return p.serialize(); }

json points_json(const std::vector<ProjPoint>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(point_json(p));
  return a;
}

json set_json(const AlgebraicPointSet& s) {
  json c;
  c["kind"] = s.kind_name();
  if (s.kind == AlgebraicPointSet::Kind::BezoutCount) {
    c["expected"] = s.expected;
    c["found"] = s.found;
  } else {
    c["eliminant_factor_degrees"] = s.eliminant_degrees;
  }
  return {{"points", points_json(s.points)}, {"count", s.points.size()}, {"certificate", c}};
}

json error_json(const Error& e) { return {{"error", std::string(error_name(e.code()))}, {"detail", e.detail()}}; }

json polys_json(const std::vector<Poly>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(p.to_string());
  return a;
}

struct NodeReport {
  json j;
  bool ok = false;
};

// Ordinary-node test on the total space at the vertex of the cross over p.
NodeReport node_at(const ConicBundleSpec& s, const ProjPoint& p) {
  NodeReport r;
  const auto v = section_values(s, p);
  auto n = cross_vertex(v);
  std::size_t w = 0;
  while (p.bits(w) == 0) ++w;
  std::size_t f = 0;
  while (n[f].is_zero()) ++f;
  const FieldElem inv = n[f].inv();
  for (auto& c : n) c = c * inv;
  const ProjPoint vertex(n[0], n[1], n[2]);
  const ChartEquation chart = total_space_chart(s, "xyz"[w], "abc"[f]);
  const FieldCtx& L = common_field(p.ctx().degree(), n[0].ctx().degree());
  std::vector<FieldElem> q;
  for (std::size_t i = 0; i < 3; ++i)
    if (i != w) q.push_back(embed(p.coord(i), L));
  for (std::size_t i = 0; i < 3; ++i)
    if (i != f) q.push_back(embed(n[i], L));
  r.j["chart"] = chart.id();
  r.j["vertex"] = point_json(vertex.minimal());
  try {
    const NodeAnalysis an = analyze_node(chart.equation, q);
    r.j["alternating_rank"] = an.alternating_rank;
    r.j["variables"] = an.variables;
    r.j["nondegenerate"] = an.nondegenerate;
    r.ok = an.nondegenerate;
  } catch (const Error& e) {
    r.j["nondegenerate"] = false;
    r.j["failure"] = error_json(e);
  }
  return r;
}

const char* kStatements[5] = {
    "H^2(S, Omega^1) = 0 for the base S = P^2",
    "the discriminant is reducible and the singular locus of each component lies in the double-line locus",
    "components meet transversally, fibers over intersections are crosses, and the total space has ordinary "
    "quadratic singularities there",
    "at least two components are Artin-Mumford",
    "the total space is smooth along every double-line fiber",
};

}  // namespace

Certificate surface_criterion(const ConicBundleSpec& s, const std::optional<std::vector<Poly>>& claimed,
                              const CriterionOptions& opt) {
  Certificate cert;
  json& j = cert.json;
  json log = json::array();
  auto record = [&](const std::string& op, json inputs, json output) {
    log.push_back({{"step", log.size()}, {"op", op}, {"inputs", std::move(inputs)}, {"output", std::move(output)}});
  };

  j["format"] = "cbundle-certificate/1";
  json spec = spec_to_json(s);
  spec.erase("claimed_factors");
  const auto [ndv, nm] = s.normalized_degrees();
  spec["normalized_degree_vector"] = ndv;
  spec["normalized_value_degree"] = nm;
  j["spec"] = spec;
  j["spec_hash"] = spec_hash(s);
  j["config"] = {{"k_max", opt.k_max}, {"witness_degree", opt.witness_degree}};
  if (claimed) j["claimed_factors"] = polys_json(*claimed);

  std::array<bool, 5>& H = cert.hypotheses;
  std::array<json, 5> why;
  H[0] = true;
  why[0] = "recorded fact for the projective plane";

  const ValidationReport vr = spec_validate(s);
  json fl;
  bool prerequisites = false;
  try {
    const FlatnessReport r = flatness_report(s, opt.k_max);
    fl = {{"flat", r.flat}, {"generically_smooth", r.generically_smooth}};
    if (r.witness) fl["witness"] = point_json(*r.witness);
    prerequisites = r.flat && r.generically_smooth;
  } catch (const Error& e) {
    fl = error_json(e);
  }
  j["flatness"] = fl;
  record("flatness_check", {{"sections", spec["sections"]}}, fl);

  const Poly delta = discriminant(s);
  j["discriminant"] = {{"polynomial", delta.to_string()}, {"degree", delta.total_degree()},
                       {"expected_degree", vr.discriminant_degree}};
  record("discriminant", json::object(), delta.to_string());

  // Components.
  std::optional<FactorList> comps;
  try {
    if (!prerequisites) throw Error(ErrorCode::NotFlat, "flatness or generic smoothness failed");
    comps = component_factorization(s, claimed);
    json fs = json::array();
    for (const auto& [f, m] : *comps)
      fs.push_back({{"polynomial", f.to_string()}, {"multiplicity", m}, {"absolutely_irreducible", true}});
    j["discriminant"]["factors"] = fs;
    j["discriminant"]["factorization"] = claimed ? "claimed, verified" : "computed";
    record("component_factorization", {{"claimed", claimed ? polys_json(*claimed) : json(nullptr)}}, fs);
  } catch (const Error& e) {
    j["discriminant"]["factorization_error"] = error_json(e);
    record("component_factorization", json::object(), error_json(e));
  }

  // Double-line locus.
  std::optional<std::vector<ProjPoint>> sigma;
  {
    const auto gens = nonzero_sigma(s);
    json sj;
    try {
      if (gens.empty()) throw Error(ErrorCode::PositiveDimensional, "all off-diagonal sections vanish");
      const AlgebraicPointSet ps = solve_system(gens, opt.k_max);
      sigma = ps.points;
      sj = set_json(ps);
    } catch (const Error& e) {
      sj = error_json(e);
    }
    j["sigma"] = sj;
    record("solve_system", {{"polys", polys_json(gens)}}, sj);
  }

  // Per-component analysis.
  std::vector<ComponentAnalysis> analyses;
  int am_count = 0;
  bool sing_ok = comps.has_value();
  if (comps) {
    json cj = json::array();
    for (const auto& [f, mult] : *comps) {
      json c = {{"polynomial", f.to_string()}, {"multiplicity", mult}};
      try {
        ComponentAnalysis a = am_component_check(s, f, opt);
        c["am_status"] = am_status_name(a.status);
        if (a.witness) {
          c["witness"] = point_json(*a.witness);
          c["witness_fiber"] = fiber_type_name(classify_fiber(s, *a.witness));
        }
        c["inside_sigma"] = a.inside_sigma;
        c["sigma_points"] = points_json(a.sigma_points);
        c["singular_points"] = points_json(a.singular_points);
        c["sing_in_sigma"] = a.sing_in_sigma;
        if (a.status != AmStatus::NotCertified) ++am_count;
        sing_ok = sing_ok && a.sing_in_sigma;
        analyses.push_back(std::move(a));
      } catch (const Error& e) {
        c["am_status"] = am_status_name(AmStatus::NotCertified);
        c["failure"] = error_json(e);
        sing_ok = false;
      }
      record("am_component_check", {{"component", f.to_string()}}, c);
      cj.push_back(std::move(c));
    }
    j["components"] = cj;
  }
  H[1] = comps && comps->size() >= 2 && sing_ok;
  why[1] = !comps ? json("no verified factorization")
                  : json({{"components", comps->size()}, {"singular_loci_in_sigma", sing_ok}});

  // Intersections.
  int nodes = 0, inter_points = 0;
  bool inter_ok = comps && comps->size() >= 2;
  if (comps) {
    json ij = json::array();
    for (std::size_t a = 0; a < comps->size(); ++a)
      for (std::size_t b = a + 1; b < comps->size(); ++b) {
        const Poly &f = (*comps)[a].first, &g = (*comps)[b].first;
        json e = {{"pair", {a, b}}, {"components", {f.to_string(), g.to_string()}}};
        try {
          const AlgebraicPointSet ps = intersection_points(f, g, opt.k_max);
          e["intersection"] = set_json(ps);
          json per = json::array();
          for (const auto& p : ps.points) {
            ++inter_points;
            json pj = {{"point", point_json(p)}};
            const bool tr = transversal_at(f, g, p);
            const FiberType ft = classify_fiber(s, p);
            pj["transversal"] = tr;
            pj["fiber"] = fiber_type_name(ft);
            bool ok = tr && ft == FiberType::Cross;
            if (ft == FiberType::Cross) {
              const NodeReport nr = node_at(s, p);
              pj["node"] = nr.j;
              ok = ok && nr.ok;
              nodes += nr.ok;
            }
            pj["ok"] = ok;
            inter_ok = inter_ok && ok;
            per.push_back(std::move(pj));
          }
          e["points"] = per;
        } catch (const Error& err) {
          e["failure"] = error_json(err);
          inter_ok = false;
        }
        record("intersection_points", e["components"], e.contains("intersection") ? e["intersection"] : e["failure"]);
        ij.push_back(std::move(e));
      }
    j["intersections"] = ij;
  }
  H[2] = inter_ok;
  why[2] = {{"intersection_points", inter_points}, {"ordinary_nodes", nodes}};
  H[3] = am_count >= 2;
  why[3] = {{"artin_mumford_components", am_count}};

  // Smoothness along the double-line fibers.
  bool dl_ok = prerequisites && sigma.has_value();
  {
    json dj = json::array();
    if (sigma && prerequisites)
      for (const auto& p : *sigma) {
        json e = {{"point", point_json(p)}, {"fiber", fiber_type_name(classify_fiber(s, p))}};
        try {
          const bool sm = smooth_along_fiber(s, p);
          e["smooth"] = sm;
          dl_ok = dl_ok && sm;
        } catch (const Error& err) {
          e["failure"] = error_json(err);
          dl_ok = false;
        }
        record("smooth_along_fiber", {{"point", point_json(p)}}, e);
        dj.push_back(std::move(e));
      }
    j["double_line_fibers"] = dj;
  }
  H[4] = dl_ok;
  why[4] = sigma ? json({{"double_line_points", sigma->size()}}) : json("double-line locus is not finite");

  if (!prerequisites)
    for (std::size_t i = 1; i < 5; ++i) H[i] = false;
  cert.all_pass = std::all_of(H.begin(), H.end(), [](bool b) { return b; });

  json hyps = json::array();
  json failed = json::array();
  for (std::size_t i = 0; i < 5; ++i) {
    const std::string id = "H" + std::to_string(i + 1);
    hyps.push_back({{"id", id}, {"statement", kStatements[i]}, {"pass", H[i]}, {"detail", why[i]}});
    if (!H[i]) failed.push_back(id);
  }
  j["hypotheses"] = hyps;
  j["verdict"] = {
      {"all_hypotheses_hold", cert.all_pass},
      {"failed", failed},
      {"prerequisites", {{"flat", fl.value("flat", false)}, {"generically_smooth", fl.value("generically_smooth", false)}}},
      {"conclusion", cert.all_pass ? "the total space admits no decomposition of the diagonal and is not stably "
                                     "rational (cited conclusion of the criterion, not re-proved here)"
                                   : "criterion not applicable: some hypothesis failed"}};
  j["paper_claims"] = {
      {"criterion", "surface criterion for conic bundles over a surface in characteristic 2"},
      {"hypotheses_checked", {"H1", "H2", "H3", "H4", "H5"}},
      {"conclusion_cited", "no decomposition of the diagonal, hence not stably rational"},
      {"recorded_not_computed", {"H^2(P^2, Omega^1) = 0", "the cohomological and Chow-theoretic conclusion"}},
      {"conditional", "the singular points of the total space are only certified near degenerate fibers; away "
                      "from them smoothness is delegated to the criterion itself"}};
  j["replay_log"] = log;
  return cert;
}

bool replay_certificate(const json& cert) {
  const ConicBundleSpec s = spec_from_json(cert.at("spec"));
  std::optional<std::vector<Poly>> claimed;
  if (cert.contains("claimed_factors")) claimed = factors_from_json(cert["claimed_factors"], *s.ctx);
  CriterionOptions opt;
  opt.k_max = cert.at("config").at("k_max").get<unsigned>();
  opt.witness_degree = cert.at("config").at("witness_degree").get<unsigned>();
  return surface_criterion(s, claimed, opt).json.dump() == cert.dump();
}

// ---- elementary transformation ----

TransformResult elementary_transform_chart(const Poly& eq, const std::vector<std::string>& scaled_vars,
                                           std::string_view t) {
  if (eq.is_zero()) throw Error(ErrorCode::ZeroEquation, "elementary transform of the zero equation");
  const std::size_t ti = eq.var_index(t);
  std::vector<Poly> images;
  for (std::size_t i = 0; i < eq.nvars(); ++i) images.push_back(Poly::variable(eq.ctx(), eq.vars(), (*eq.vars())[i]));
  const Poly tv = images[ti];
  for (const auto& v : scaled_vars) {
    const std::size_t vi = eq.var_index(v);
    if (vi == ti) throw Error(ErrorCode::InvalidInput, "the parameter cannot be scaled by itself");
    images[vi] = tv * images[vi];
  }
  const Poly sub = compose(eq, images);
  int order = std::numeric_limits<int>::max();
  for (const auto& term : sub.terms()) order = std::min(order, int{term.mono.exp[ti]});
  std::vector<Poly::Term> terms = sub.terms();
  for (auto& term : terms) term.mono.exp[ti] = static_cast<uint16_t>(term.mono.exp[ti] - order);
  return {order, Poly::from_terms(eq.ctx(), eq.vars(), std::move(terms))};
}

// ---- search ----

namespace {

Entry entry_named(const std::string& key) {
  for (Entry e : kEntries)
    if (entry_name(e) == key) return e;
  throw Error(ErrorCode::InvalidInput, "template: unknown entry '" + key + "'");
}

std::vector<Monomial> forms_basis(int d) {
  std::vector<Monomial> out;
  for (int i = d; i >= 0; --i)
    for (int j = d - i; j >= 0; --j) {
      Monomial m;
      m.exp[0] = static_cast<uint16_t>(i);
      m.exp[1] = static_cast<uint16_t>(j);
      m.exp[2] = static_cast<uint16_t>(d - i - j);
      out.push_back(m);
    }
  return out;
}

// The off-diagonal entry whose square multiplies a diagonal entry in Δ.
Entry opposite(Entry diag) {
  switch (diag) {
    case Entry::AA: return Entry::BC;
    case Entry::BB: return Entry::AC;
    case Entry::CC: return Entry::AB;
    default: throw Error(ErrorCode::InvalidInput, "template: the determined entry must be diagonal");
  }
}

// Visits coefficient vectors over F_{2^k} on n slots by increasing weight,
// then by support in lexicographic order, then by coefficient values.
template <class Visit>
void enumerate_by_weight(std::size_t n, uint64_t q, uint64_t limit, Visit&& visit) {
  uint64_t count = 0;
  std::vector<uint64_t> coeff(n, 0);
  for (std::size_t w = 0; w <= n; ++w) {
    std::vector<std::size_t> idx(w);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<uint64_t> vals(w, 1);
      while (true) {
        std::fill(coeff.begin(), coeff.end(), 0);
        for (std::size_t i = 0; i < w; ++i) coeff[idx[i]] = vals[i];
        if (count++ >= limit) return;
        visit(coeff);
        std::size_t i = 0;
        while (i < w && vals[i] == q - 1) vals[i++] = 1;
        if (i == w) break;
        ++vals[i];
      }
      std::size_t i = w;
      while (i > 0 && idx[i - 1] == n - w + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t k = i; k < w; ++k) idx[k] = idx[k - 1] + 1;
    }
  }
}

}  // namespace

SearchTemplate template_from_json(const json& j) {
  SearchTemplate t;
  try {
    t.name = j.value("name", std::string{});
    const int k = j.at("field_degree").get<int>();
    if (k < 1 || k > 64) throw Error(ErrorCode::UnsupportedDegree, "field_degree " + std::to_string(k));
    t.ctx = &field_new(static_cast<unsigned>(k));
    for (std::size_t i = 0; i < 3; ++i) t.degree_vector[i] = j.at("degree_vector").at(i).get<int>();
    t.value_degree = j.at("value_degree").get<int>();
    if (j.contains("fixed"))
      for (const auto& [key, val] : j["fixed"].items())
        t.fixed[static_cast<std::size_t>(entry_named(key))] = parse_poly(val.get<std::string>(), *t.ctx, xyz_vars());
    if (j.contains("free"))
      for (const auto& [key, val] : j["free"].items()) {
        SearchTemplate::FreeEntry f{entry_named(key), parse_poly(val.value("base", "0"), *t.ctx, xyz_vars()),
                                    parse_poly(val.value("multiplier", "1"), *t.ctx, xyz_vars()),
                                    val.at("degree").get<int>()};
        t.free.push_back(std::move(f));
      }
    if (j.contains("determined")) t.determined = entry_named(j["determined"].get<std::string>());
    if (j.contains("target")) t.target = factors_from_json(j["target"], *t.ctx);
    if (j.contains("sigma_points"))
      for (const auto& p : j["sigma_points"]) t.sigma_points.push_back(parse_point(p.get<std::string>()));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("template: ") + e.what());
  }
  for (Entry e : kEntries) {
    const auto i = static_cast<std::size_t>(e);
    const bool is_free = std::any_of(t.free.begin(), t.free.end(), [&](const auto& f) { return f.entry == e; });
    const int covered = t.fixed[i].has_value() + is_free + (t.determined == e);
    if (covered > 1) throw Error(ErrorCode::InvalidInput, "template: entry " + entry_name(e) + " given twice");
  }
  if (t.determined) opposite(*t.determined);
  return t;
}

SearchReport search_spieghiamolo(const SearchTemplate& t, const std::vector<Poly>& target_components,
                                 const SearchOptions& opt) {
  if (!t.ctx) throw Error(ErrorCode::InvalidInput, "template without a field");
  const FieldCtx& F = *t.ctx;
  const std::vector<Poly> target = target_components.empty() ? t.target : target_components;
  Poly T = Poly::constant(F, xyz_vars(), 1);
  for (const auto& f : target) T = T * embed(f, F);

  struct Slot {
    std::size_t free_index;
    Poly term;  // multiplier * monomial
  };
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < t.free.size(); ++i)
    for (const auto& m : forms_basis(t.free[i].degree))
      slots.push_back({i, t.free[i].multiplier * Poly::monomial(F, xyz_vars(), m)});
  if (opt.seed != 0) std::shuffle(slots.begin(), slots.end(), std::mt19937_64(opt.seed));

  SearchReport rep;
  const uint64_t q = uint64_t{1} << F.degree();
  rep.candidates_total = 1;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (rep.candidates_total > UINT64_MAX / q) {
      rep.candidates_total = UINT64_MAX;
      break;
    }
    rep.candidates_total *= q;
  }
  rep.budget_exhausted = rep.candidates_total > opt.budget;

  std::vector<ConicBundleSpec> survivors;
  enumerate_by_weight(slots.size(), q, opt.budget, [&](const std::vector<uint64_t>& coeff) {
    ++rep.examined;
    ConicBundleSpec s{&F, t.degree_vector, t.value_degree, {}, target, t.name};
    s.sections.assign(6, Poly(F, xyz_vars()));
    for (Entry e : kEntries)
      if (t.fixed[static_cast<std::size_t>(e)]) s.sections[static_cast<std::size_t>(e)] = *t.fixed[static_cast<std::size_t>(e)];
    for (const auto& f : t.free) s.sections[static_cast<std::size_t>(f.entry)] = f.base;
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (coeff[i]) s.sections[static_cast<std::size_t>(t.free[slots[i].free_index].entry)] += slots[i].term.scaled(coeff[i]);
    // Divisibility: Δ is linear in a diagonal entry with coefficient the
    // square of the opposite off-diagonal entry.
    if (t.determined) {
      const Poly& opp = s.s(opposite(*t.determined));
      if (opp.is_zero()) return;
      const Poly rest = discriminant(s);
      auto quo = try_exact_div(T + rest, square(opp));
      if (!quo) return;
      s.sections[static_cast<std::size_t>(*t.determined)] = *quo;
    } else if (discriminant(s) != T) {
      return;
    }
    try {
      spec_validate(s);
    } catch (const Error&) {
      return;
    }
    ++rep.passed_divisibility;
    if (!t.sigma_points.empty()) {
      try {
        const auto pts = solve_system(nonzero_sigma(s), opt.criterion.k_max).points;
        if (pts.size() != t.sigma_points.size()) return;
        for (const auto& p : t.sigma_points)
          if (std::find(pts.begin(), pts.end(), p) == pts.end()) return;
      } catch (const Error&) {
        return;
      }
    }
    ++rep.passed_sigma;
    survivors.push_back(std::move(s));
  });

  std::vector<std::optional<Certificate>> certs(survivors.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < survivors.size(); i = next++) {
      Certificate c = surface_criterion(survivors[i], target, opt.criterion);
      if (c.all_pass) certs[i] = std::move(c);
    }
  };
  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < survivors.size(); ++i)
    if (certs[i]) rep.hits.push_back({survivors[i], std::move(*certs[i])});
  return rep;
}

}  // namespace cbundle
