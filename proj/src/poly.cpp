#include "cbundle/poly.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace cbundle {

bool grlex_greater(const Monomial& a, const Monomial& b) noexcept {
  const unsigned ta = a.total(), tb = b.total();
  if (ta != tb) return ta > tb;
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (a.exp[i] != b.exp[i]) return a.exp[i] > b.exp[i];
  return false;
}

namespace {

struct MonoHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (auto e : m.exp) h = (h ^ e) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h);
  }
};

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    const unsigned e = unsigned{a.exp[i]} + b.exp[i];
    if (e > 0xffff) throw Error(ErrorCode::InvalidInput, "exponent overflow");
    r.exp[i] = static_cast<uint16_t>(e);
  }
  return r;
}

Monomial mono_div(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) r.exp[i] = static_cast<uint16_t>(a.exp[i] - b.exp[i]);
  return r;
}

void sort_terms(std::vector<Poly::Term>& t) {
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return grlex_greater(a.mono, b.mono); });
}

}  // namespace

Vars make_vars(std::vector<std::string> names) {
  if (names.size() > kMaxVars)
    throw Error(ErrorCode::TooManyVariables, std::to_string(names.size()) + " variables");
  return std::make_shared<const std::vector<std::string>>(std::move(names));
}

bool same_vars(const Vars& a, const Vars& b) noexcept { return a == b || *a == *b; }

const Vars& xyz_vars() {
  static const Vars v = make_vars({"x", "y", "z"});
  return v;
}

Poly::Poly(const FieldCtx& ctx, Vars vars) : ctx_(&ctx), vars_(std::move(vars)) {
  if (!vars_) vars_ = make_vars({});
}

Poly Poly::constant(const FieldCtx& ctx, Vars vars, uint64_t c) {
  Poly p(ctx, std::move(vars));
  if (c != 0) p.terms_.push_back({Monomial{}, c});
  return p;
}

Poly Poly::variable(const FieldCtx& ctx, Vars vars, std::string_view name) {
  Poly p(ctx, std::move(vars));
  Monomial m;
  m.exp[p.var_index(name)] = 1;
  p.terms_.push_back({m, 1});
  return p;
}

Poly Poly::monomial(const FieldCtx& ctx, Vars vars, const Monomial& m, uint64_t c) {
  Poly p(ctx, std::move(vars));
  if (c != 0) p.terms_.push_back({m, c});
  return p;
}

Poly Poly::from_terms(const FieldCtx& ctx, Vars vars, std::vector<Term> terms) {
  Poly p(ctx, std::move(vars));
  sort_terms(terms);
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coeff ^= t.coeff;
      if (p.terms_.back().coeff == 0) p.terms_.pop_back();
    } else if (t.coeff != 0) {
      p.terms_.push_back(t);
    }
  }
  return p;
}

std::size_t Poly::var_index(std::string_view name) const {
  for (std::size_t i = 0; i < vars_->size(); ++i)
    if ((*vars_)[i] == name) return i;
  throw Error(ErrorCode::UnknownVariable, std::string(name));
}

bool Poly::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.total() == 0);
}

int Poly::total_degree() const noexcept {
  return terms_.empty() ? -1 : static_cast<int>(terms_.front().mono.total());
}

int Poly::degree_in(std::size_t var) const noexcept {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& t : terms_) d = std::max(d, int{t.mono.exp[var]});
  return d;
}

Homogeneity Poly::homogeneity() const noexcept {
  Homogeneity h;
  if (terms_.empty()) {
    h.zero = true;
    return h;
  }
  const unsigned d = terms_.front().mono.total();
  for (const auto& t : terms_)
    if (t.mono.total() != d) return h;
  h.degree = static_cast<int>(d);
  return h;
}

FieldElem Poly::leading_coeff() const {
  return {*ctx_, terms_.empty() ? 0 : terms_.front().coeff};
}

FieldElem Poly::constant_term() const {
  return {*ctx_, coeff(Monomial{})};
}

uint64_t Poly::coeff(const Monomial& m) const noexcept {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const Monomial& x) { return grlex_greater(t.mono, x); });
  return (it != terms_.end() && it->mono == m) ? it->coeff : 0;
}

std::vector<std::size_t> Poly::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nvars(); ++i)
    if (degree_in(i) > 0) out.push_back(i);
  return out;
}

Poly Poly::monic() const {
  if (terms_.empty()) return *this;
  return scaled(ctx_->inv(terms_.front().coeff));
}

Poly Poly::scaled(uint64_t c) const {
  Poly r(*ctx_, vars_);
  if (c == 0) return r;
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.coeff = ctx_->mul(t.coeff, c);
  return r;
}

void Poly::check_compatible(const Poly& o, const char* op) const {
  if (ctx_ != o.ctx_)
    throw Error(ErrorCode::ContextMismatch, std::string(op) + ": " + ctx_->name() + " vs " + o.ctx_->name());
  if (!same_vars(vars_, o.vars_)) throw Error(ErrorCode::ContextMismatch, std::string(op) + ": variable lists differ");
}

Poly& Poly::operator+=(const Poly& o) {
  check_compatible(o, "add");
  if (o.terms_.empty()) return *this;
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() && j < o.terms_.size()) {
    if (terms_[i].mono == o.terms_[j].mono) {
      const uint64_t c = terms_[i].coeff ^ o.terms_[j].coeff;
      if (c) out.push_back({terms_[i].mono, c});
      ++i, ++j;
    } else if (grlex_greater(terms_[i].mono, o.terms_[j].mono)) {
      out.push_back(terms_[i++]);
    } else {
      out.push_back(o.terms_[j++]);
    }
  }
  out.insert(out.end(), terms_.begin() + static_cast<std::ptrdiff_t>(i), terms_.end());
  out.insert(out.end(), o.terms_.begin() + static_cast<std::ptrdiff_t>(j), o.terms_.end());
  terms_ = std::move(out);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  a.check_compatible(b, "mul");
  if (a.is_zero() || b.is_zero()) return Poly(*a.ctx_, a.vars_);
  const FieldCtx& ctx = *a.ctx_;
  if (b.terms_.size() == 1 || a.terms_.size() == 1) {
    const Poly& many = a.terms_.size() == 1 ? b : a;
    const Poly::Term& one = a.terms_.size() == 1 ? a.terms_[0] : b.terms_[0];
    Poly r(ctx, a.vars_);
    r.terms_.reserve(many.terms_.size());
    // Multiplying by a monomial preserves the order.
    for (const auto& t : many.terms_) r.terms_.push_back({mono_mul(t.mono, one.mono), ctx.mul(t.coeff, one.coeff)});
    return r;
  }
  std::unordered_map<Monomial, uint64_t, MonoHash> acc;
  acc.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) acc[mono_mul(s.mono, t.mono)] ^= ctx.mul(s.coeff, t.coeff);
  std::vector<Poly::Term> terms;
  terms.reserve(acc.size());
  for (const auto& [m, c] : acc)
    if (c) terms.push_back({m, c});
  sort_terms(terms);
  Poly r(ctx, a.vars_);
  r.terms_ = std::move(terms);
  return r;
}

bool operator==(const Poly& a, const Poly& b) noexcept {
  if (a.ctx_ != b.ctx_ || !same_vars(a.vars_, b.vars_) || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coeff != b.terms_[i].coeff) return false;
  return true;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    std::string mono;
    for (std::size_t i = 0; i < nvars(); ++i) {
      const unsigned e = t.mono.exp[i];
      if (e == 0) continue;
      if (!mono.empty()) mono += '*';
      mono += (*vars_)[i];
      if (e > 1) mono += '^' + std::to_string(e);
    }
    if (t.coeff != 1) {
      out += ctx_->format(t.coeff);
      if (!mono.empty()) out += '*';
    } else if (mono.empty()) {
      out += '1';
    }
    out += mono;
  }
  return out;
}

Poly pow(const Poly& p, unsigned e) {
  Poly result = Poly::constant(p.ctx(), p.vars(), 1);
  Poly base = p;
  while (e) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = square(base);
  }
  return result;
}

std::optional<Poly> try_exact_div(const Poly& p, const Poly& q) {
  if (q.is_zero()) throw Error(ErrorCode::DivisionByZero, "polynomial division by zero");
  if (&p.ctx() != &q.ctx() || !same_vars(p.vars(), q.vars()))
    throw Error(ErrorCode::ContextMismatch, "exact_div");
  const FieldCtx& ctx = p.ctx();
  if (p.is_zero()) return Poly(ctx, p.vars());
  const auto& qt = q.terms();
  const Monomial lead = qt.front().mono;
  const uint64_t lead_inv = ctx.inv(qt.front().coeff);
  if (qt.size() == 1) {
    std::vector<Poly::Term> out;
    out.reserve(p.size());
    for (const auto& t : p.terms()) {
      if (!lead.divides(t.mono)) return std::nullopt;
      out.push_back({mono_div(t.mono, lead), ctx.mul(t.coeff, lead_inv)});
    }
    return Poly::from_terms(ctx, p.vars(), std::move(out));
  }
  auto cmp = [](const Monomial& a, const Monomial& b) { return grlex_greater(a, b); };
  std::map<Monomial, uint64_t, decltype(cmp)> rem(cmp);
  for (const auto& t : p.terms()) rem.emplace(t.mono, t.coeff);
  std::vector<Poly::Term> quot;
  while (!rem.empty()) {
    auto it = rem.begin();
    if (!lead.divides(it->first)) return std::nullopt;
    const Monomial m = mono_div(it->first, lead);
    const uint64_t c = ctx.mul(it->second, lead_inv);
    quot.push_back({m, c});
    rem.erase(it);
    for (std::size_t i = 1; i < qt.size(); ++i) {
      const Monomial mm = mono_mul(qt[i].mono, m);
      const uint64_t cc = ctx.mul(qt[i].coeff, c);
      auto [pos, fresh] = rem.emplace(mm, cc);
      if (!fresh) {
        pos->second ^= cc;
        if (pos->second == 0) rem.erase(pos);
      }
    }
  }
  return Poly::from_terms(ctx, p.vars(), std::move(quot));
}

Poly exact_div(const Poly& p, const Poly& q) {
  auto r = try_exact_div(p, q);
  if (!r) throw Error(ErrorCode::NotDivisible, "(" + p.to_string() + ") / (" + q.to_string() + ")");
  return *std::move(r);
}

Poly square(const Poly& p) {
  std::vector<Poly::Term> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) out.push_back({mono_mul(t.mono, t.mono), p.ctx().sqr(t.coeff)});
  return Poly::from_terms(p.ctx(), p.vars(), std::move(out));
}

std::optional<Poly> square_root(const Poly& p) {
  std::vector<Poly::Term> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) {
    Monomial m;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (t.mono.exp[i] % 2) return std::nullopt;
      m.exp[i] = static_cast<uint16_t>(t.mono.exp[i] / 2);
    }
    out.push_back({m, p.ctx().sqrt(t.coeff)});
  }
  return Poly::from_terms(p.ctx(), p.vars(), std::move(out));
}

Poly partial_derivative(const Poly& p, std::size_t var) {
  std::vector<Poly::Term> out;
  for (const auto& t : p.terms()) {
    if (t.mono.exp[var] % 2 == 0) continue;
    Poly::Term d = t;
    --d.mono.exp[var];
    out.push_back(d);
  }
  return Poly::from_terms(p.ctx(), p.vars(), std::move(out));
}

Poly partial_derivative(const Poly& p, std::string_view var) { return partial_derivative(p, p.var_index(var)); }

Poly embed(const Poly& p, const FieldCtx& target) {
  if (&p.ctx() == &target) return p;
  const unsigned from = p.ctx().degree();
  if (target.degree() % from != 0) throw Error(ErrorCode::NoEmbedding, p.ctx().name() + " -> " + target.name());
  std::vector<Poly::Term> out(p.terms());
  for (auto& t : out) t.coeff = embed_bits(t.coeff, from, target.degree());
  return Poly::from_terms(target, p.vars(), std::move(out));
}

std::optional<Poly> descend(const Poly& p, const FieldCtx& sub) {
  if (&p.ctx() == &sub) return p;
  std::vector<Poly::Term> out(p.terms());
  for (auto& t : out) {
    auto b = descend_bits(t.coeff, sub.degree(), p.ctx().degree());
    if (!b) return std::nullopt;
    t.coeff = *b;
  }
  return Poly::from_terms(sub, p.vars(), std::move(out));
}

Poly with_vars(const Poly& p, const Vars& vars) {
  if (same_vars(p.vars(), vars)) return Poly::from_terms(p.ctx(), vars, p.terms());
  std::vector<std::size_t> map(p.nvars(), kMaxVars);
  for (std::size_t i = 0; i < p.nvars(); ++i)
    for (std::size_t j = 0; j < vars->size(); ++j)
      if ((*p.vars())[i] == (*vars)[j]) map[i] = j;
  std::vector<Poly::Term> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) {
    Poly::Term n{Monomial{}, t.coeff};
    for (std::size_t i = 0; i < p.nvars(); ++i) {
      if (t.mono.exp[i] == 0) continue;
      if (map[i] == kMaxVars) throw Error(ErrorCode::UnknownVariable, (*p.vars())[i]);
      n.mono.exp[map[i]] = t.mono.exp[i];
    }
    out.push_back(n);
  }
  return Poly::from_terms(p.ctx(), vars, std::move(out));
}

Poly compose(const Poly& p, std::span<const Poly> images) {
  if (images.size() != p.nvars()) throw Error(ErrorCode::InvalidInput, "compose: wrong number of images");
  if (images.empty()) return p;
  const FieldCtx& ctx = images[0].ctx();
  const Vars& vars = images[0].vars();
  for (const auto& im : images)
    if (&im.ctx() != &ctx || !same_vars(im.vars(), vars)) throw Error(ErrorCode::ContextMismatch, "compose images");
  const Poly src = embed(p, ctx);
  std::vector<std::vector<Poly>> powers(p.nvars());
  auto power = [&](std::size_t i, unsigned e) -> const Poly& {
    auto& v = powers[i];
    if (v.empty()) v.push_back(Poly::constant(ctx, vars, 1));
    while (v.size() <= e) v.push_back(v.back() * images[i]);
    return v[e];
  };
  Poly result(ctx, vars);
  for (const auto& t : src.terms()) {
    Poly term = Poly::constant(ctx, vars, t.coeff);
    for (std::size_t i = 0; i < p.nvars(); ++i)
      if (t.mono.exp[i]) term = term * power(i, t.mono.exp[i]);
    result += term;
  }
  return result;
}

Poly substitute(const Poly& p, const std::map<std::string, Poly>& assignment) {
  const FieldCtx* ctx = &p.ctx();
  for (const auto& [name, val] : assignment) {
    if (!same_vars(val.vars(), p.vars())) throw Error(ErrorCode::ContextMismatch, "substitute: value variables");
    if (val.ctx().degree() > ctx->degree()) ctx = &val.ctx();
  }
  std::vector<Poly> images;
  images.reserve(p.nvars());
  for (std::size_t i = 0; i < p.nvars(); ++i) {
    const std::string& name = (*p.vars())[i];
    auto it = assignment.find(name);
    if (it == assignment.end()) {
      images.push_back(Poly::variable(*ctx, p.vars(), name));
    } else {
      if (ctx->degree() % it->second.ctx().degree() != 0)
        throw Error(ErrorCode::ContextMismatch, "substitute: incompatible fields");
      images.push_back(embed(it->second, *ctx));
    }
  }
  for (const auto& [name, val] : assignment) (void)p.var_index(name);
  return compose(p, images);
}

Poly substitute(const Poly& p, std::string_view var, const FieldElem& value) {
  const std::size_t v = p.var_index(var);
  const FieldCtx& ctx = value.ctx();
  const Poly src = embed(p, ctx);
  std::vector<uint64_t> pw{1};
  std::vector<Poly::Term> out;
  out.reserve(src.size());
  for (const auto& t : src.terms()) {
    const unsigned e = t.mono.exp[v];
    while (pw.size() <= e) pw.push_back(ctx.mul(pw.back(), value.bits()));
    Poly::Term n = t;
    n.mono.exp[v] = 0;
    n.coeff = ctx.mul(t.coeff, pw[e]);
    out.push_back(n);
  }
  return Poly::from_terms(ctx, p.vars(), std::move(out));
}

FieldElem evaluate(const Poly& p, std::span<const FieldElem> point) {
  if (point.size() != p.nvars()) throw Error(ErrorCode::InvalidInput, "evaluate: wrong point dimension");
  if (point.empty()) return p.constant_term();
  const FieldCtx& ctx = point[0].ctx();
  for (const auto& c : point)
    if (&c.ctx() != &ctx) throw Error(ErrorCode::ContextMismatch, "evaluate: mixed point fields");
  const unsigned from = p.ctx().degree();
  if (ctx.degree() % from != 0) throw Error(ErrorCode::NoEmbedding, p.ctx().name() + " -> " + ctx.name());
  std::vector<std::vector<uint64_t>> pw(p.nvars());
  for (std::size_t i = 0; i < p.nvars(); ++i) {
    const int d = p.degree_in(i);
    pw[i].resize(static_cast<std::size_t>(std::max(d, 0)) + 1);
    pw[i][0] = 1;
    for (int e = 1; e <= d; ++e) pw[i][e] = ctx.mul(pw[i][e - 1], point[i].bits());
  }
  uint64_t acc = 0;
  const bool same = &p.ctx() == &ctx;
  for (const auto& t : p.terms()) {
    uint64_t c = same ? t.coeff : embed_bits(t.coeff, from, ctx.degree());
    for (std::size_t i = 0; i < p.nvars() && c; ++i)
      if (t.mono.exp[i]) c = ctx.mul(c, pw[i][t.mono.exp[i]]);
    acc ^= c;
  }
  return {ctx, acc};
}

std::vector<Poly> coefficients_in(const Poly& p, std::size_t var) {
  const int d = p.degree_in(var);
  std::vector<std::vector<Poly::Term>> buckets(static_cast<std::size_t>(std::max(d, -1) + 1));
  for (const auto& t : p.terms()) {
    Poly::Term n = t;
    const unsigned e = n.mono.exp[var];
    n.mono.exp[var] = 0;
    buckets[e].push_back(n);
  }
  std::vector<Poly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(Poly::from_terms(p.ctx(), p.vars(), std::move(b)));
  return out;
}

UPoly to_upoly(const Poly& p, std::size_t var) {
  std::vector<uint64_t> c(static_cast<std::size_t>(std::max(p.degree_in(var), -1) + 1), 0);
  for (const auto& t : p.terms()) {
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (i != var && t.mono.exp[i])
        throw Error(ErrorCode::InvalidInput, "to_upoly: polynomial involves other variables: " + p.to_string());
    c[t.mono.exp[var]] = t.coeff;
  }
  return UPoly(p.ctx(), std::move(c));
}

Poly from_upoly(const UPoly& u, Vars vars, std::size_t var) {
  std::vector<Poly::Term> out;
  for (std::size_t i = 0; i < u.coeffs().size(); ++i) {
    if (!u.coeffs()[i]) continue;
    Monomial m;
    m.exp[var] = static_cast<uint16_t>(i);
    out.push_back({m, u.coeffs()[i]});
  }
  return Poly::from_terms(u.ctx(), std::move(vars), std::move(out));
}

namespace {

// Fraction-free (Bareiss) determinant over the polynomial ring.
Poly bareiss_det(std::vector<std::vector<Poly>> m, const Poly& one) {
  const std::size_t n = m.size();
  if (n == 0) return one;
  Poly prev = one;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t r = k + 1;
      while (r < n && m[r][k].is_zero()) ++r;
      if (r == n) return Poly(one.ctx(), one.vars());
      std::swap(m[k], m[r]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Poly v = m[i][j] * m[k][k] + m[i][k] * m[k][j];
        m[i][j] = prev.is_constant() ? v.scaled(prev.ctx().inv(prev.constant_term().bits())) : exact_div(v, prev);
      }
      m[i][k] = Poly(one.ctx(), one.vars());
    }
    prev = m[k][k];
  }
  return m[n - 1][n - 1];
}

}  // namespace

Poly resultant(const Poly& f, const Poly& g, std::size_t var) {
  if (&f.ctx() != &g.ctx() || !same_vars(f.vars(), g.vars())) throw Error(ErrorCode::ContextMismatch, "resultant");
  if (f.is_zero() || g.is_zero()) return Poly(f.ctx(), f.vars());
  const auto a = coefficients_in(f, var);
  const auto b = coefficients_in(g, var);
  const std::size_t m = a.size() - 1, n = b.size() - 1;
  const Poly one = Poly::constant(f.ctx(), f.vars(), 1);
  if (m == 0) return pow(a[0], static_cast<unsigned>(n));
  if (n == 0) return pow(b[0], static_cast<unsigned>(m));
  const std::size_t size = m + n;
  const Poly zero(f.ctx(), f.vars());
  std::vector<std::vector<Poly>> s(size, std::vector<Poly>(size, zero));
  // Rows hold coefficients from the leading one downwards.
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i <= m; ++i) s[r][r + i] = a[m - i];
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i <= n; ++i) s[n + r][r + i] = b[n - i];
  return bareiss_det(std::move(s), one);
}

Poly resultant(const Poly& f, const Poly& g, std::string_view var) { return resultant(f, g, f.var_index(var)); }

Poly homogenize(const Poly& affine, std::size_t w, int degree) {
  std::vector<Poly::Term> out;
  out.reserve(affine.size());
  for (const auto& t : affine.terms()) {
    const int tot = static_cast<int>(t.mono.total());
    if (tot > degree || t.mono.exp[w] != 0)
      throw Error(ErrorCode::InvalidInput, "homogenize: term exceeds target degree");
    Poly::Term n = t;
    n.mono.exp[w] = static_cast<uint16_t>(degree - tot);
    out.push_back(n);
  }
  return Poly::from_terms(affine.ctx(), affine.vars(), std::move(out));
}

Poly binary_gcd(const Poly& f, const Poly& g) {
  if (&f.ctx() != &g.ctx() || !same_vars(f.vars(), g.vars())) throw Error(ErrorCode::ContextMismatch, "binary_gcd");
  if (f.is_zero()) return g.monic();
  if (g.is_zero()) return f.monic();
  if (!f.homogeneity().degree || !g.homogeneity().degree)
    throw Error(ErrorCode::InvalidInput, "binary_gcd expects homogeneous binary forms");
  std::vector<std::size_t> used = f.support();
  for (auto i : g.support())
    if (std::find(used.begin(), used.end(), i) == used.end()) used.push_back(i);
  std::sort(used.begin(), used.end());
  if (used.size() > 2) throw Error(ErrorCode::InvalidInput, "binary_gcd: more than two variables");
  if (f.nvars() < 2 && used.size() < 2) {
    // Single-variable monomials.
    const int e = std::min(f.total_degree(), g.total_degree());
    Monomial m;
    if (!used.empty()) m.exp[used[0]] = static_cast<uint16_t>(e);
    return Poly::monomial(f.ctx(), f.vars(), m);
  }
  std::size_t s = used.empty() ? 0 : used[0];
  std::size_t t = used.size() == 2 ? used[1] : (s == 0 ? 1 : 0);
  // Strip the powers of t, then work in the chart t = 1.
  auto split = [&](const Poly& p) {
    int a = p.degree_in(t);
    for (const auto& term : p.terms()) a = std::min(a, int{term.mono.exp[t]});
    std::vector<uint64_t> c(static_cast<std::size_t>(p.total_degree() - a) + 1, 0);
    for (const auto& term : p.terms()) c[term.mono.exp[s]] = term.coeff;
    return std::pair{a, UPoly(p.ctx(), std::move(c))};
  };
  const auto [af, uf] = split(f);
  const auto [ag, ug] = split(g);
  const UPoly h = gcd(uf, ug);
  const int tpow = std::min(af, ag);
  std::vector<Poly::Term> out;
  for (std::size_t i = 0; i < h.coeffs().size(); ++i) {
    if (!h.coeffs()[i]) continue;
    Monomial m;
    m.exp[s] = static_cast<uint16_t>(i);
    m.exp[t] = static_cast<uint16_t>(h.degree() - static_cast<int>(i) + tpow);
    out.push_back({m, h.coeffs()[i]});
  }
  return Poly::from_terms(f.ctx(), f.vars(), std::move(out)).monic();
}

// ---- parser ----

namespace {

class Parser {
 public:
  Parser(std::string_view text, const FieldCtx& ctx, const Vars& vars) : s_(text), ctx_(ctx), vars_(vars) {}

  Poly parse() {
    skip_ws();
    if (pos_ == s_.size()) fail("empty expression");
    Poly p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::ParseError, "at position " + std::to_string(pos_) + ": " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Poly expr() {
    Poly acc = term();
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') return acc;
      ++pos_;
      acc += term();
    }
  }

  static bool starts_factor(char c) {
    return c == '(' || std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  Poly term() {
    Poly acc = factor();
    for (;;) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        acc = acc * factor();
      } else if (starts_factor(c)) {
        acc = acc * factor();
      } else {
        return acc;
      }
    }
  }

  Poly factor() {
    Poly base = primary();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const unsigned e = number();
      if (e > 0xffff) fail("exponent too large");
      base = pow(base, e);
      if (peek() == '^') fail("chained exponents are ambiguous; use parentheses");
    }
    return base;
  }

  unsigned number() {
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected a number");
    uint64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + static_cast<unsigned>(s_[pos_++] - '0');
      if (v > 0xffffffffULL) fail("number too large");
    }
    return static_cast<unsigned>(v);
  }

  Poly primary() {
    const char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (c == '(') {
      ++pos_;
      Poly inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Poly::constant(ctx_, vars_, number() & 1u);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      // Field literal F<q>:<hex>.
      if (c == 'F' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
        std::size_t q = pos_ + 1;
        while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
        if (q < s_.size() && s_[q] == ':') {
          std::size_t h = q + 1;
          while (h < s_.size() && std::isxdigit(static_cast<unsigned char>(s_[h]))) ++h;
          const std::string_view lit = s_.substr(start, h - start);
          pos_ = h;
          FieldElem e = [&] {
            try {
              return parse_field_literal(lit, ctx_);
            } catch (const Error& err) {
              pos_ = start;
              if (err.code() == ErrorCode::ParseError) fail(err.detail());
              throw;
            }
          }();
          return Poly::constant(ctx_, vars_, e.bits());
        }
      }
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      for (std::size_t i = 0; i < vars_->size(); ++i)
        if ((*vars_)[i] == name) return Poly::variable(ctx_, vars_, name);
      if (name == "j") {
        if (ctx_.degree() % 2 != 0) {
          pos_ = start;
          fail("'j' needs a field of even degree, got " + ctx_.name());
        }
        return Poly::constant(ctx_, vars_, cube_root_of_unity(ctx_).bits());
      }
      throw Error(ErrorCode::UnknownVariable, name + " at position " + std::to_string(start));
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const FieldCtx& ctx_;
  const Vars& vars_;
};

}  // namespace

Poly parse_poly(std::string_view text, const FieldCtx& ctx, const Vars& vars) {
  return Parser(text, ctx, vars).parse();
}

FieldElem parse_constant(std::string_view text, const FieldCtx& ctx) {
  static const Vars none = make_vars({});
  const Poly p = parse_poly(text, ctx, none);
  return p.constant_term();
}

}  // namespace cbundle
