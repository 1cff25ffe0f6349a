#include "cbundle/conic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <numeric>

#include "cbundle/factor.hpp"
#include "cbundle/geom.hpp"

namespace cbundle {

std::string entry_name(Entry e) {
  static const char* names[] = {"aa", "ab", "ac", "bb", "bc", "cc"};
  return names[static_cast<int>(e)];
}

std::pair<int, int> entry_indices(Entry e) {
  switch (e) {
    case Entry::AA: return {0, 0};
    case Entry::AB: return {0, 1};
    case Entry::AC: return {0, 2};
    case Entry::BB: return {1, 1};
    case Entry::BC: return {1, 2};
    case Entry::CC: return {2, 2};
  }
  return {0, 0};
}

Entry entry_of(int i, int j) {
  if (i > j) std::swap(i, j);
  for (Entry e : kEntries)
    if (entry_indices(e) == std::pair{i, j}) return e;
  throw Error(ErrorCode::InvalidInput, "bad entry index");
}

// ---- points ----

ProjPoint::ProjPoint(const FieldCtx& ctx, std::array<uint64_t, 3> coords) : ctx_(&ctx), c_(coords) {
  std::size_t i = 0;
  while (i < 3 && c_[i] == 0) ++i;
  if (i == 3) throw Error(ErrorCode::InvalidInput, "projective point with all coordinates zero");
  const uint64_t s = ctx.inv(c_[i]);
  for (auto& c : c_) c = ctx.mul(c & ctx.mask(), s);
}

ProjPoint::ProjPoint(const FieldElem& x, const FieldElem& y, const FieldElem& z)
    : ProjPoint(x.ctx(), {x.bits(), y.bits(), z.bits()}) {
  if (&y.ctx() != &x.ctx() || &z.ctx() != &x.ctx()) throw Error(ErrorCode::ContextMismatch, "point coordinates");
}

ProjPoint ProjPoint::minimal() const {
  unsigned d = 1;
  for (auto c : c_) d = std::lcm(d, ctx_->subfield_degree(c));
  if (d == ctx_->degree()) return *this;
  const FieldCtx& sub = field_new(d);
  std::array<uint64_t, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = *descend_bits(c_[i], d, ctx_->degree());
  return ProjPoint(sub, out);
}

ProjPoint ProjPoint::embedded(const FieldCtx& target) const {
  if (&target == ctx_) return *this;
  if (target.degree() % ctx_->degree() != 0) throw Error(ErrorCode::NoEmbedding, ctx_->name() + " -> " + target.name());
  std::array<uint64_t, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = embed_bits(c_[i], ctx_->degree(), target.degree());
  return ProjPoint(target, out);
}

std::string ProjPoint::to_string() const {
  std::string out = "[";
  for (int i = 0; i < 3; ++i) {
    if (i) out += ':';
    out += c_[i] <= 1 ? std::to_string(c_[i]) : ctx_->format(c_[i]);
  }
  return out + "]";
}

std::vector<std::string> ProjPoint::serialize() const {
  return {ctx_->format(c_[0]), ctx_->format(c_[1]), ctx_->format(c_[2])};
}

bool operator==(const ProjPoint& a, const ProjPoint& b) {
  if (a.ctx_ == b.ctx_) return a.c_ == b.c_;
  const FieldCtx& L = common_field(a.ctx_->degree(), b.ctx_->degree());
  return a.embedded(L).c_ == b.embedded(L).c_;
}

bool operator<(const ProjPoint& a, const ProjPoint& b) {
  if (a.ctx_->degree() != b.ctx_->degree()) return a.ctx_->degree() < b.ctx_->degree();
  return a.c_ < b.c_;
}

const FieldCtx& common_field(unsigned a, unsigned b) {
  const unsigned l = std::lcm(a, b);
  if (l > FieldCtx::kMaxDegree)
    throw Error(ErrorCode::ExtensionBound, "common field of degrees " + std::to_string(a) + " and " + std::to_string(b));
  return field_new(l);
}

FieldElem evaluate_at(const Poly& f, const ProjPoint& p) {
  const FieldCtx& L = common_field(f.ctx().degree(), p.ctx().degree());
  const ProjPoint q = p.embedded(L);
  const std::array<FieldElem, 3> c = q.coords();
  if (f.nvars() != 3) throw Error(ErrorCode::InvalidInput, "evaluate_at expects a polynomial in x, y, z");
  return evaluate(f, c);
}

ProjPoint parse_point(std::string_view text, unsigned k) {
  std::vector<std::string> raw;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      raw.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  raw.push_back(cur);
  // "F16" followed by a piece is one field literal split at its colon.
  std::vector<std::string> pieces;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string p = raw[i];
    const auto b = p.find_first_not_of(" \t");
    p = b == std::string::npos ? "" : p.substr(b);
    const bool lit = p.size() >= 2 && p[0] == 'F' &&
                     std::all_of(p.begin() + 1, p.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (lit && i + 1 < raw.size()) {
      pieces.push_back(p + ":" + raw[i + 1]);
      ++i;
    } else {
      pieces.push_back(raw[i]);
    }
  }
  if (pieces.size() != 3) throw Error(ErrorCode::ParseError, "point needs three coordinates: " + std::string(text));
  unsigned deg = k;
  if (deg == 0) {
    deg = 1;
    for (const auto& p : pieces) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 'j' && (i == 0 || !std::isalnum(static_cast<unsigned char>(p[i - 1])))) deg = std::lcm(deg, 2u);
        if (p[i] == 'F' && i + 1 < p.size() && std::isdigit(static_cast<unsigned char>(p[i + 1]))) {
          std::size_t e = i + 1;
          while (e < p.size() && std::isdigit(static_cast<unsigned char>(p[e]))) ++e;
          const std::string q = p.substr(i + 1, e - i - 1);
          const unsigned kk = q == "18446744073709551616" ? 64u : static_cast<unsigned>(__builtin_ctzll(std::stoull(q)));
          deg = std::lcm(deg, std::max(kk, 1u));
        }
      }
    }
    if (deg > FieldCtx::kMaxDegree) throw Error(ErrorCode::ExtensionBound, "point field");
  }
  const FieldCtx& F = field_new(deg);
  return ProjPoint(parse_constant(pieces[0], F), parse_constant(pieces[1], F), parse_constant(pieces[2], F));
}

std::string fiber_type_name(FiberType t) {
  switch (t) {
    case FiberType::Smooth: return "Smooth";
    case FiberType::Cross: return "Cross";
    case FiberType::DoubleLine: return "DoubleLine";
    case FiberType::NotConic: return "NotConic";
  }
  return "?";
}

// ---- specs ----

int ConicBundleSpec::expected_degree(Entry e) const {
  auto [i, j] = entry_indices(e);
  return degree_vector[static_cast<std::size_t>(i)] + degree_vector[static_cast<std::size_t>(j)] + value_degree;
}

std::pair<std::array<int, 3>, int> ConicBundleSpec::normalized_degrees() const {
  const int t = -*std::min_element(degree_vector.begin(), degree_vector.end());
  return {{degree_vector[0] + t, degree_vector[1] + t, degree_vector[2] + t}, value_degree - 2 * t};
}

ConicBundleSpec make_spec(const FieldCtx& ctx, std::array<int, 3> degree_vector, int value_degree,
                          const std::array<std::string, 6>& sections, std::string name) {
  ConicBundleSpec s{&ctx, degree_vector, value_degree, {}, std::nullopt, std::move(name)};
  for (const auto& text : sections) s.sections.push_back(parse_poly(text, ctx, xyz_vars()));
  return s;
}

ValidationReport spec_validate(const ConicBundleSpec& s) {
  if (s.sections.size() != 6) throw Error(ErrorCode::InvalidInput, "a spec needs six sections");
  bool any = false;
  for (Entry e : kEntries) {
    const Poly& p = s.s(e);
    if (&p.ctx() != s.ctx || !same_vars(p.vars(), xyz_vars()))
      throw Error(ErrorCode::ContextMismatch, "s_" + entry_name(e) + " is not over the base field in x, y, z");
    const Homogeneity h = p.homogeneity();
    if (h.zero) continue;
    any = true;
    const int want = s.expected_degree(e);
    if (!h.degree)
      throw Error(ErrorCode::DegreeMismatch, "s_" + entry_name(e) + " is not homogeneous (expected degree " +
                                                 std::to_string(want) + "): " + p.to_string());
    if (*h.degree != want)
      throw Error(ErrorCode::DegreeMismatch, "s_" + entry_name(e) + " has degree " + std::to_string(*h.degree) +
                                                 ", expected " + std::to_string(want) + ": " + p.to_string());
  }
  if (!any) throw Error(ErrorCode::AllZero, "all six sections vanish");
  const auto& d = s.degree_vector;
  return {2 * (d[0] + d[1] + d[2]) + 3 * s.value_degree};
}

Poly discriminant(const ConicBundleSpec& s) {
  const Poly &ab = s.s(Entry::AB), &ac = s.s(Entry::AC), &bc = s.s(Entry::BC);
  return ab * bc * ac + square(ab) * s.s(Entry::CC) + square(ac) * s.s(Entry::BB) + square(bc) * s.s(Entry::AA);
}

std::array<Poly, 3> sigma_generators(const ConicBundleSpec& s) {
  return {s.s(Entry::AB), s.s(Entry::AC), s.s(Entry::BC)};
}

std::vector<FieldElem> section_values(const ConicBundleSpec& s, const ProjPoint& p) {
  std::vector<FieldElem> v;
  v.reserve(6);
  for (Entry e : kEntries) v.push_back(evaluate_at(s.s(e), p));
  return v;
}

std::array<FieldElem, 3> cross_vertex(const std::vector<FieldElem>& v) {
  return {v[static_cast<int>(Entry::BC)], v[static_cast<int>(Entry::AC)], v[static_cast<int>(Entry::AB)]};
}

FiberType classify_fiber(const ConicBundleSpec& s, const ProjPoint& p) {
  const auto v = section_values(s, p);
  if (std::all_of(v.begin(), v.end(), [](const FieldElem& e) { return e.is_zero(); })) return FiberType::NotConic;
  const FieldElem &aa = v[0], &ab = v[1], &ac = v[2], &bb = v[3], &bc = v[4], &cc = v[5];
  if (ab.is_zero() && ac.is_zero() && bc.is_zero()) return FiberType::DoubleLine;
  const FieldElem delta = ab * bc * ac + ab.square() * cc + ac.square() * bb + bc.square() * aa;
  return delta.is_zero() ? FiberType::Cross : FiberType::Smooth;
}

const Vars& fiber_vars() {
  static const Vars v = make_vars({"a", "b", "c"});
  return v;
}

const Vars& total_vars() {
  static const Vars v = make_vars({"x", "y", "z", "a", "b", "c"});
  return v;
}

Poly conic_form(const ConicBundleSpec& s) {
  const FieldCtx& F = *s.ctx;
  Poly q(F, total_vars());
  static const char* fv[] = {"a", "b", "c"};
  for (Entry e : kEntries) {
    auto [i, j] = entry_indices(e);
    q += with_vars(s.s(e), total_vars()) * Poly::variable(F, total_vars(), fv[i]) *
         Poly::variable(F, total_vars(), fv[j]);
  }
  return q;
}

namespace {

const Vars& chart_vars(char base, char fiber) {
  static std::mutex mu;
  static std::map<std::pair<char, char>, Vars> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{base, fiber}];
  if (!slot) {
    std::vector<std::string> names;
    for (char c : std::string("xyz"))
      if (c != base) names.emplace_back(1, c);
    for (char c : std::string("abc"))
      if (c != fiber) names.emplace_back(1, c);
    slot = make_vars(std::move(names));
  }
  return slot;
}

}  // namespace

ChartEquation total_space_chart(const ConicBundleSpec& s, char base, char fiber) {
  if (std::string("xyz").find(base) == std::string::npos || std::string("abc").find(fiber) == std::string::npos)
    throw Error(ErrorCode::InvalidInput, "bad chart");
  const FieldElem one = FieldElem::one(*s.ctx);
  Poly q = conic_form(s);
  q = substitute(q, std::string(1, base), one);
  q = substitute(q, std::string(1, fiber), one);
  return {base, fiber, with_vars(q, chart_vars(base, fiber))};
}

std::vector<ChartEquation> total_space_charts(const ConicBundleSpec& s) {
  std::vector<ChartEquation> out;
  for (char w : std::string("xyz"))
    for (char v : std::string("abc")) out.push_back(total_space_chart(s, w, v));
  return out;
}

FlatnessReport flatness_report(const ConicBundleSpec& s, unsigned k_max) {
  spec_validate(s);
  FlatnessReport r;
  r.generically_smooth = !discriminant(s).is_zero();
  std::vector<Poly> nonzero;
  for (const auto& p : s.sections)
    if (!p.is_zero()) nonzero.push_back(p);
  Poly g = nonzero[0];
  for (const auto& p : nonzero) g = homogeneous_gcd(g, p);
  if (!g.is_constant()) {
    r.flat = false;
    r.witness = point_on_curve(g);
    return r;
  }
  const AlgebraicPointSet common = solve_system(nonzero, k_max);
  r.flat = common.points.empty();
  if (!r.flat) r.witness = common.points.front();
  return r;
}

FlatnessReport flatness_check(const ConicBundleSpec& s, unsigned k_max) {
  FlatnessReport r = flatness_report(s, k_max);
  if (!r.flat)
    throw Error(ErrorCode::NotFlat,
                "all sections vanish at " + (r.witness ? r.witness->to_string() : std::string("a curve")));
  if (!r.generically_smooth) throw Error(ErrorCode::NotGenericallySmooth, "discriminant vanishes identically");
  return r;
}

}  // namespace cbundle
