#include "cbundle/upoly.hpp"

#include <algorithm>
#include <random>

namespace cbundle {

UPoly::UPoly(const FieldCtx& ctx, std::vector<uint64_t> coeffs) : ctx_(&ctx), c_(std::move(coeffs)) {
  trim();
}

UPoly UPoly::monomial(const FieldCtx& ctx, unsigned degree, uint64_t c) {
  std::vector<uint64_t> v(degree + 1, 0);
  v[degree] = c;
  return UPoly(ctx, std::move(v));
}

void UPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

UPoly UPoly::monic() const {
  if (is_zero() || lead() == 1) return *this;
  return scaled(ctx_->inv(lead()));
}

UPoly UPoly::derivative() const {
  std::vector<uint64_t> d;
  if (c_.size() > 1) d.resize(c_.size() - 1, 0);
  for (std::size_t i = 1; i < c_.size(); i += 2) d[i - 1] = c_[i];
  return UPoly(*ctx_, std::move(d));
}

UPoly UPoly::scaled(uint64_t c) const {
  if (c == 0) return UPoly(*ctx_);
  std::vector<uint64_t> v(c_);
  for (auto& x : v) x = ctx_->mul(x, c);
  return UPoly(*ctx_, std::move(v));
}

UPoly UPoly::shifted(unsigned n) const {
  if (is_zero()) return *this;
  std::vector<uint64_t> v(n, 0);
  v.insert(v.end(), c_.begin(), c_.end());
  return UPoly(*ctx_, std::move(v));
}

uint64_t UPoly::eval(uint64_t point) const {
  uint64_t r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = ctx_->mul(r, point) ^ *it;
  return r;
}

UPoly& UPoly::operator+=(const UPoly& o) {
  if (ctx_ != o.ctx_) throw Error(ErrorCode::ContextMismatch, "univariate add");
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] ^= o.c_[i];
  trim();
  return *this;
}

UPoly operator*(const UPoly& a, const UPoly& b) {
  if (a.ctx_ != b.ctx_) throw Error(ErrorCode::ContextMismatch, "univariate mul");
  if (a.is_zero() || b.is_zero()) return UPoly(*a.ctx_);
  std::vector<uint64_t> r(a.c_.size() + b.c_.size() - 1, 0);
  const FieldCtx& f = *a.ctx_;
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] ^= f.mul(a.c_[i], b.c_[j]);
  }
  return UPoly(f, std::move(r));
}

std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
  if (b.is_zero()) throw Error(ErrorCode::DivisionByZero, "univariate division by zero");
  if (&a.ctx() != &b.ctx()) throw Error(ErrorCode::ContextMismatch, "univariate divmod");
  const FieldCtx& f = a.ctx();
  if (a.degree() < b.degree()) return {UPoly(f), a};
  std::vector<uint64_t> r = a.coeffs();
  const auto& bc = b.coeffs();
  const std::size_t db = bc.size() - 1;
  std::vector<uint64_t> q(r.size() - db, 0);
  const uint64_t inv_lead = f.inv(bc.back());
  for (std::size_t i = r.size(); i-- > db;) {
    const uint64_t c = r[i];
    if (c == 0) continue;
    const uint64_t t = f.mul(c, inv_lead);
    q[i - db] = t;
    for (std::size_t j = 0; j <= db; ++j) r[i - db + j] ^= f.mul(t, bc[j]);
  }
  r.resize(db);
  return {UPoly(f, std::move(q)), UPoly(f, std::move(r))};
}

UPoly operator/(const UPoly& a, const UPoly& b) { return divmod(a, b).first; }
UPoly operator%(const UPoly& a, const UPoly& b) { return divmod(a, b).second; }

UPoly gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    UPoly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

ExtendedGcd xgcd(const UPoly& a, const UPoly& b) {
  const FieldCtx& f = a.ctx();
  UPoly r0 = a, r1 = b;
  UPoly s0 = UPoly::constant(f, 1), s1(f);
  UPoly t0(f), t1 = UPoly::constant(f, 1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    UPoly s2 = s0 - q * s1;
    UPoly t2 = t0 - q * t1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  const uint64_t inv = f.inv(r0.lead());
  return {r0.scaled(inv), s0.scaled(inv), t0.scaled(inv)};
}

UPoly square_mod(const UPoly& a, const UPoly& m) {
  const FieldCtx& f = a.ctx();
  std::vector<uint64_t> sq(a.coeffs().empty() ? 0 : 2 * a.coeffs().size() - 1, 0);
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) sq[2 * i] = f.sqr(a.coeffs()[i]);
  return UPoly(f, std::move(sq)) % m;
}

UPoly mulmod(const UPoly& a, const UPoly& b, const UPoly& m) { return (a * b) % m; }

UPoly frobenius_mod(const UPoly& a, unsigned n, const UPoly& m) {
  UPoly r = a % m;
  for (unsigned i = 0; i < n; ++i) r = square_mod(r, m);
  return r;
}

UPoly poly_sqrt(const UPoly& f) {
  const FieldCtx& ctx = f.ctx();
  std::vector<uint64_t> r((f.coeffs().size() + 1) / 2, 0);
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    if (f.coeffs()[i] == 0) continue;
    if (i % 2 != 0) throw Error(ErrorCode::InvalidInput, "polynomial is not a square");
    r[i / 2] = ctx.sqrt(f.coeffs()[i]);
  }
  return UPoly(ctx, std::move(r));
}

UFactorList squarefree_decomposition(const UPoly& input) {
  UFactorList out;
  if (input.degree() <= 0) return out;
  const UPoly f = input.monic();
  const UPoly d = f.derivative();
  if (d.is_zero()) {
    for (auto& [p, m] : squarefree_decomposition(poly_sqrt(f))) out.emplace_back(p, 2 * m);
    return out;
  }
  UPoly c = gcd(f, d);
  UPoly w = f / c;
  int i = 1;
  while (w.degree() > 0) {
    UPoly y = gcd(w, c);
    UPoly z = w / y;
    if (z.degree() > 0) out.emplace_back(z.monic(), i);
    ++i;
    w = std::move(y);
    c = c / w;
  }
  if (c.degree() > 0)
    for (auto& [p, m] : squarefree_decomposition(poly_sqrt(c.monic()))) out.emplace_back(p, 2 * m);
  return out;
}

namespace {

// Splits a squarefree monic f into products of irreducibles of equal degree.
std::vector<std::pair<UPoly, unsigned>> distinct_degree(UPoly f) {
  std::vector<std::pair<UPoly, unsigned>> out;
  const FieldCtx& ctx = f.ctx();
  const UPoly x = UPoly::x(ctx);
  UPoly h = x % f;
  unsigned d = 0;
  while (f.degree() >= 2 * static_cast<int>(d + 1)) {
    ++d;
    h = frobenius_mod(h, ctx.degree(), f);
    UPoly g = gcd(f, h - x);
    if (g.degree() > 0) {
      out.emplace_back(g, d);
      f = f / g;
      h = h % f;
    }
  }
  if (f.degree() > 0) out.emplace_back(f, static_cast<unsigned>(f.degree()));
  return out;
}

// Equal-degree splitting via the absolute trace map x + x^2 + ... + x^(2^(kd-1)).
void equal_degree(const UPoly& g, unsigned d, std::mt19937_64& rng, std::vector<UPoly>& out) {
  if (g.degree() == static_cast<int>(d)) {
    out.push_back(g.monic());
    return;
  }
  const FieldCtx& ctx = g.ctx();
  const unsigned rounds = ctx.degree() * d;
  for (;;) {
    std::vector<uint64_t> w(static_cast<std::size_t>(g.degree()));
    for (auto& c : w) c = rng() & ctx.mask();
    UPoly acc(ctx, std::move(w));
    if (acc.degree() <= 0) continue;
    UPoly tr = acc;
    for (unsigned i = 1; i < rounds; ++i) {
      acc = square_mod(acc, g);
      tr += acc;
    }
    UPoly h = gcd(g, tr);
    if (h.degree() > 0 && h.degree() < g.degree()) {
      equal_degree(h, d, rng, out);
      equal_degree(g / h, d, rng, out);
      return;
    }
  }
}

}  // namespace

bool canonical_less(const UPoly& a, const UPoly& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (std::size_t i = a.coeffs().size(); i-- > 0;)
    if (a.coeffs()[i] != b.coeffs()[i]) return a.coeffs()[i] < b.coeffs()[i];
  return false;
}

UFactorList factor(const UPoly& f) {
  UFactorList out;
  std::mt19937_64 rng(0x5eed5eedULL + f.ctx().degree());
  for (auto& [part, mult] : squarefree_decomposition(f)) {
    for (auto& [block, d] : distinct_degree(part)) {
      std::vector<UPoly> pieces;
      equal_degree(block, d, rng, pieces);
      for (auto& p : pieces) out.emplace_back(std::move(p), mult);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (canonical_less(a.first, b.first)) return true;
    if (canonical_less(b.first, a.first)) return false;
    return a.second < b.second;
  });
  return out;
}

bool is_irreducible(const UPoly& f) {
  if (f.degree() <= 0) return false;
  const auto fac = factor(f);
  return fac.size() == 1 && fac[0].second == 1;
}

std::vector<uint64_t> roots(const UPoly& f) {
  std::vector<uint64_t> out;
  if (f.degree() <= 0) return out;
  const FieldCtx& ctx = f.ctx();
  const UPoly m = f.monic();
  const UPoly x = UPoly::x(ctx);
  // Product of the distinct linear factors: gcd(f, x^q - x).
  UPoly lin = gcd(m, frobenius_mod(x, ctx.degree(), m) - x);
  if (lin.degree() <= 0) return out;
  std::mt19937_64 rng(0x0dd5eedULL + ctx.degree());
  std::vector<UPoly> pieces;
  equal_degree(lin, 1, rng, pieces);
  for (const auto& p : pieces) out.push_back(p.coeff(0));
  std::sort(out.begin(), out.end());
  return out;
}

UPoly embed(const UPoly& f, const FieldCtx& target) {
  const unsigned from = f.ctx().degree();
  if (target.degree() % from != 0)
    throw Error(ErrorCode::NoEmbedding, f.ctx().name() + " -> " + target.name());
  std::vector<uint64_t> v(f.coeffs());
  for (auto& c : v) c = embed_bits(c, from, target.degree());
  return UPoly(target, std::move(v));
}

}  // namespace cbundle
