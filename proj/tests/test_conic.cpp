#include <random>

#include "cbundle/conic.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace cbundle;

namespace {

const FieldCtx& F2 = field_new(1);
const FieldCtx& F4 = field_new(2);

Poly P(const std::string& s, const FieldCtx& F = F2) { return parse_poly(s, F, xyz_vars()); }

ConicBundleSpec first_family() {
  return make_spec(F2, {0, 1, 3}, 0,
                   {"1", "x", "0", "z*y", "x*(y^3+z^3)+y^2*z^2", "y^6+z^6+x^4*y*z+x*z^5+x*y^5"}, "ex1");
}

// Fiber type by enumerating the fiber conic's points and their singularity.
FiberType classify_by_enumeration(const ConicBundleSpec& s, const ProjPoint& p) {
  const FieldCtx& L = common_field(s.ctx->degree(), p.ctx().degree());
  std::vector<uint64_t> sv;
  for (Entry e : kEntries) sv.push_back(oracle::eval_terms(s.s(e), L, oracle::lift(p, L)));
  const Vars abc = make_vars({"a", "b", "c"});
  std::vector<Poly::Term> terms;
  for (Entry e : kEntries) {
    auto [i, j] = entry_indices(e);
    Monomial m;
    m.exp[static_cast<std::size_t>(i)]++;
    m.exp[static_cast<std::size_t>(j)]++;
    terms.push_back({m, sv[static_cast<std::size_t>(e)]});
  }
  const Poly q = Poly::from_terms(L, abc, terms);
  if (q.is_zero()) return FiberType::NotConic;
  int on = 0, singular = 0;
  for (const auto& u : oracle::plane_points(L)) {
    const auto uv = oracle::lift(u, L);
    if (oracle::eval_terms(q, L, uv) != 0) continue;
    ++on;
    bool sing = true;
    for (std::size_t i = 0; i < 3; ++i)
      if (oracle::eval_terms(partial_derivative(q, i), L, uv) != 0) sing = false;
    singular += sing;
  }
  if (singular == 0) return FiberType::Smooth;
  if (singular == 1) return FiberType::Cross;
  CHECK(singular == on);
  return FiberType::DoubleLine;
}

}  // namespace

TEST_CASE("projective points") {
  const ProjPoint p(F4, {2, 3, 0});  // [j : j+1 : 0] -> [1 : j : 0]
  CHECK(p.bits(0) == 1);
  CHECK(p.bits(1) == F4.mul(3, F4.inv(2)));
  CHECK_THROWS_AS(ProjPoint(F4, {0, 0, 0}), Error);
  const ProjPoint q(F4, {0, 1, 1});
  CHECK(q.minimal().ctx().degree() == 1);
  CHECK(q == ProjPoint(F2, {0, 1, 1}));
  CHECK(p != q);
  CHECK(parse_point("0:1:0") == ProjPoint(F2, {0, 1, 0}));
  CHECK(parse_point("1:j:0").ctx().degree() == 2);
  CHECK(parse_point("1:F16:2:1").ctx().degree() == 4);
  CHECK(parse_point("F16:2:F4:2:1") == ProjPoint(field_new(4), {embed_bits(2, 4, 4), embed_bits(2, 2, 4), 1}));
  CHECK(parse_point("0:1:0").to_string() == "[0:1:0]");
  CHECK_THROWS_AS(parse_point("0:1"), Error);
  CHECK_THROWS_AS(parse_point("0:0:0"), Error);
}

TEST_CASE("spec validation") {
  const ConicBundleSpec s = first_family();
  CHECK(spec_validate(s).discriminant_degree == 8);
  try {
    make_spec(F2, {0, 1, 3}, 0, {"1", "x^2", "0", "z*y", "0", "0"});
    spec_validate(make_spec(F2, {0, 1, 3}, 0, {"1", "x^2", "0", "z*y", "0", "0"}));
    FAIL("expected DegreeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeMismatch);
    CHECK(std::string(e.what()).find("s_ab") != std::string::npos);
  }
  try {
    spec_validate(make_spec(F2, {0, 0, 0}, 1, {"0", "0", "0", "0", "0", "0"}));
    FAIL("expected AllZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllZero);
  }
  // The second family only matches the degree law after twisting.
  const std::array<std::string, 6> third{"x+y", "x", "0", "x", "x*(y^2+z^2)+y*((x+z)*z+(z+y)*y)",
                                         "x^2*y*z^2 + x^2*z^3 + x*y^4 + x*y^3*z + x*z^4 + y^5 + y^2*z^3 + y*z^4 + z^5"};
  CHECK_NOTHROW(spec_validate(make_spec(F2, {0, 0, 2}, 1, third)));
  CHECK_THROWS_AS(spec_validate(make_spec(F2, {1, 1, 3}, 1, third)), Error);
  const ConicBundleSpec twisted = make_spec(F2, {1, 1, 3}, -1, third);
  CHECK_NOTHROW(spec_validate(twisted));
  CHECK(twisted.normalized_degrees() == std::pair{std::array<int, 3>{0, 0, 2}, 1});
}

TEST_CASE("discriminants of known bundles") {
  CHECK(discriminant(first_family()) == P("x^6*y*z + x^3*z^5 + x^3*y^5 + y^4*z^4"));
  CHECK(discriminant(first_family()) == P("(x^3*z+y^4)*(x^3*y+z^4)"));
  const auto aabc = make_spec(F2, {0, 0, 0}, 0, {"1", "0", "0", "0", "1", "0"});
  CHECK(discriminant(aabc) == P("1"));
  const auto diag = make_spec(F2, {0, 0, 0}, 2, {"x^2", "0", "0", "y^2", "0", "z^2+x*y"});
  CHECK(discriminant(diag).is_zero());
  const auto dl = make_spec(F2, {0, 2, 1}, 0, {"1", "x*y", "0", "y^4+x^3*z+z^4", "0", "x^2+y*z+z^2"});
  CHECK(discriminant(dl) == P("x^2*y^2*(x^2+y*z+z^2)"));
  const auto sig = sigma_generators(first_family());
  CHECK(sig[0] == P("x"));
  CHECK(sig[1].is_zero());
  CHECK(sig[2] == P("x*(y^3+z^3)+y^2*z^2"));
}

TEST_CASE("fiber classification") {
  const auto s = first_family();
  CHECK(classify_fiber(s, parse_point("0:1:0")) == FiberType::DoubleLine);
  CHECK(classify_fiber(s, parse_point("0:0:1")) == FiberType::DoubleLine);
  CHECK(classify_fiber(s, parse_point("1:0:0")) == FiberType::Cross);
  CHECK(classify_fiber(s, parse_point("0:1:1")) == FiberType::Smooth);
  const auto notconic = make_spec(F2, {0, 0, 0}, 1, {"x", "y", "0", "x", "0", "y"});
  CHECK(classify_fiber(notconic, parse_point("0:0:1")) == FiberType::NotConic);

  SUBCASE("agrees with point enumeration over F16") {
    const FieldCtx& F16 = field_new(4);
    for (const auto& p : oracle::plane_points(F16)) CHECK(classify_fiber(s, p) == classify_by_enumeration(s, p));
  }
  SUBCASE("random specs over F4") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const auto r = oracle::random_spec(F4, {0, 0, 1}, 1, rng, 0.4);
      for (const auto& p : oracle::plane_points(F4)) CHECK(classify_fiber(r, p) == classify_by_enumeration(r, p));
    }
  }
}

TEST_CASE("discriminant properties on random specs") {
  std::mt19937_64 rng(2024);
  const FieldCtx& F16 = field_new(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const FieldCtx& F = trial % 2 ? F4 : F2;
    const std::array<int, 3> e = {static_cast<int>(rng() % 2), static_cast<int>(rng() % 2), static_cast<int>(rng() % 3)};
    const auto s = oracle::random_spec(F, e, static_cast<int>(rng() % 2), rng);
    const Poly delta = discriminant(s);
    const auto h = delta.homogeneity();
    CHECK((h.zero || h.degree == 2 * (e[0] + e[1] + e[2]) + 3 * s.value_degree));

    // Permuting the roles of a, b, c.
    static const std::array<std::array<int, 3>, 6> perms = {
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    const auto& pi = perms[static_cast<std::size_t>(trial % 6)];
    ConicBundleSpec t = s;
    for (Entry en : kEntries) {
      auto [i, j] = entry_indices(en);
      t.sections[static_cast<std::size_t>(entry_of(pi[static_cast<std::size_t>(i)], pi[static_cast<std::size_t>(j)]))] =
          s.s(en);
    }
    for (int i = 0; i < 3; ++i) t.degree_vector[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)])] = e[static_cast<std::size_t>(i)];
    CHECK(discriminant(t) == delta);

    // Base change along a random invertible linear map of the plane.
    std::array<Poly, 3> img{Poly(F, xyz_vars()), Poly(F, xyz_vars()), Poly(F, xyz_vars())};
    uint64_t det = 0;
    std::array<uint64_t, 9> m{};
    while (det == 0) {
      for (auto& c : m) c = rng() & F.mask();
      det = F.mul(m[0], F.mul(m[4], m[8]) ^ F.mul(m[5], m[7])) ^ F.mul(m[1], F.mul(m[3], m[8]) ^ F.mul(m[5], m[6])) ^
            F.mul(m[2], F.mul(m[3], m[7]) ^ F.mul(m[4], m[6]));
    }
    static const char* v[] = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        img[static_cast<std::size_t>(i)] += Poly::variable(F, xyz_vars(), v[j]).scaled(m[static_cast<std::size_t>(3 * i + j)]);
    ConicBundleSpec u = s;
    for (auto& sec : u.sections) sec = compose(sec, img);
    CHECK(discriminant(u) == compose(delta, img));
    const auto sg = sigma_generators(s), ug = sigma_generators(u);
    for (int i = 0; i < 3; ++i) CHECK(ug[static_cast<std::size_t>(i)] == compose(sg[static_cast<std::size_t>(i)], img));

    // Sigma lies inside Delta at a random F16 point.
    const ProjPoint p(F16, {rng() & 15, rng() & 15, (rng() & 15) | 1});
    const FiberType ft = classify_fiber(s, p);
    const bool delta_zero = evaluate_at(delta, p).is_zero();
    if (ft == FiberType::DoubleLine || ft == FiberType::NotConic) CHECK(delta_zero);
    CHECK((ft == FiberType::Smooth) == !delta_zero);
    bool sigma = true;
    for (const auto& g : sg) sigma = sigma && evaluate_at(g, p).is_zero();
    if (sigma) CHECK(delta_zero);
  }
}

TEST_CASE("total space charts") {
  const auto s = first_family();
  const auto charts = total_space_charts(s);
  CHECK(charts.size() == 9);
  const auto c = total_space_chart(s, 'z', 'a');
  CHECK(c.id() == "z=1,a=1");
  const Vars xybc = make_vars({"x", "y", "b", "c"});
  CHECK(c.equation == parse_poly("1 + x*b + y*b^2 + (x*(y^3+1)+y^2)*b*c + (y^6+1+x^4*y+x+x*y^5)*c^2", F2, xybc));

  // Gluing: with fiber weights w^{e_i} the nine charts cut out one variety.
  std::mt19937_64 rng(5);
  const FieldCtx& F16 = field_new(4);
  const Poly q = conic_form(s);
  int tested = 0;
  for (int iter = 0; iter < 4000 && tested < 60; ++iter) {
    std::vector<uint64_t> pt(6);
    for (auto& x : pt) x = (rng() % 15) + 1;  // all coordinates nonzero
    const bool on = oracle::eval_terms(q, F16, pt) == 0;
    if (!on && iter % 10) continue;
    ++tested;
    for (const auto& ch : charts) {
      const std::size_t w = static_cast<std::size_t>(std::string("xyz").find(ch.base));
      const std::size_t v = static_cast<std::size_t>(std::string("abc").find(ch.fiber));
      std::array<uint64_t, 3> base, fib;
      const uint64_t winv = F16.inv(pt[w]);
      for (std::size_t i = 0; i < 3; ++i) base[i] = F16.mul(pt[i], winv);
      for (std::size_t i = 0; i < 3; ++i) fib[i] = F16.mul(pt[3 + i], F16.pow(pt[w], static_cast<uint64_t>(s.degree_vector[i])));
      const uint64_t vinv = F16.inv(fib[v]);
      std::vector<uint64_t> chart_pt;
      for (std::size_t i = 0; i < 3; ++i)
        if (i != w) chart_pt.push_back(base[i]);
      for (std::size_t i = 0; i < 3; ++i)
        if (i != v) chart_pt.push_back(F16.mul(fib[i], vinv));
      CHECK((oracle::eval_terms(ch.equation, F16, chart_pt) == 0) == on);
    }
  }
  CHECK(tested >= 20);
}

TEST_CASE("flatness") {
  const auto r = flatness_check(first_family());
  CHECK(r.flat);
  CHECK(r.generically_smooth);
  const auto bad = make_spec(F2, {0, 0, 0}, 2, {"x^2", "0", "0", "x*y", "0", "x*z+y^2"});
  const auto rep = flatness_report(bad);
  CHECK_FALSE(rep.flat);
  REQUIRE(rep.witness.has_value());
  CHECK(*rep.witness == parse_point("0:0:1"));
  try {
    flatness_check(bad);
    FAIL("expected NotFlat");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFlat);
  }
  // Sections sharing the line x = 0: a witness on it.
  const auto line = make_spec(F2, {0, 0, 0}, 1, {"x", "0", "0", "x", "0", "x"});
  const auto lr = flatness_report(line);
  CHECK_FALSE(lr.flat);
  REQUIRE(lr.witness.has_value());
  CHECK(lr.witness->bits(0) == 0);
  const auto diag = make_spec(F2, {0, 0, 0}, 2, {"x^2+y*z", "0", "0", "y^2", "0", "z^2"});
  try {
    flatness_check(diag);
    FAIL("expected NotGenericallySmooth");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotGenericallySmooth);
  }
}
