#pragma once

// Arithmetic in the binary fields F_{2^k}, 1 <= k <= 64.
//
// An element is a bit vector of coordinates in the polynomial basis
// 1, g, g^2, ..., g^{k-1}, where g is the class of t modulo the fixed
// defining polynomial of degree k (the numerically smallest irreducible one).
// Contexts are process-wide singletons: two elements belong to the same field
// iff their context pointers are equal.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cbundle/error.hpp"

namespace cbundle {

class FieldCtx {
 public:
  static constexpr unsigned kMaxDegree = 64;

  FieldCtx(const FieldCtx&) = delete;
  FieldCtx& operator=(const FieldCtx&) = delete;

  unsigned degree() const noexcept { return k_; }
  /// Defining polynomial without its leading t^k term.
  uint64_t modulus_low() const noexcept { return low_; }
  uint64_t mask() const noexcept { return mask_; }
  /// "F4", "F16", ... (the number of elements).
  std::string name() const;

  uint64_t add(uint64_t a, uint64_t b) const noexcept { return a ^ b; }
  uint64_t mul(uint64_t a, uint64_t b) const noexcept;
  uint64_t sqr(uint64_t a) const noexcept { return mul(a, a); }
  uint64_t pow(uint64_t a, uint64_t e) const noexcept;
  uint64_t inv(uint64_t a) const;
  uint64_t sqrt(uint64_t a) const noexcept;
  /// a^(2^times).
  uint64_t frobenius(uint64_t a, unsigned times) const noexcept;
  /// Absolute trace to the two-element field.
  unsigned trace(uint64_t a) const noexcept;
  /// Smallest d dividing k with a^(2^d) = a.
  unsigned subfield_degree(uint64_t a) const noexcept;

  std::string format(uint64_t bits) const;

 private:
  friend const FieldCtx& field_new(unsigned k);
  FieldCtx(unsigned k, uint64_t low);

  unsigned k_;
  uint64_t low_;
  uint64_t mask_;
};

/// The context of F_{2^k}. Throws UnsupportedDegree outside 1..64.
const FieldCtx& field_new(unsigned k);

/// Defining polynomial table entry (low part) for degree k.
uint64_t modulus_table_entry(unsigned k);

/// Rabin irreducibility test for t^k + low over the two-element field.
bool is_irreducible_binary(unsigned k, uint64_t low);

class FieldElem {
 public:
  FieldElem(const FieldCtx& ctx, uint64_t bits);

  static FieldElem zero(const FieldCtx& ctx) { return {ctx, 0}; }
  static FieldElem one(const FieldCtx& ctx) { return {ctx, 1}; }
  /// The class of t; for k = 1 this is 0 (modulus t).
  static FieldElem generator(const FieldCtx& ctx) { return {ctx, ctx.degree() == 1 ? 0u : 2u}; }

  const FieldCtx& ctx() const noexcept { return *ctx_; }
  uint64_t bits() const noexcept { return bits_; }
  bool is_zero() const noexcept { return bits_ == 0; }
  bool is_one() const noexcept { return bits_ == 1; }

  FieldElem inv() const;
  FieldElem pow(uint64_t e) const { return {*ctx_, ctx_->pow(bits_, e)}; }
  FieldElem sqrt() const { return {*ctx_, ctx_->sqrt(bits_)}; }
  FieldElem square() const { return {*ctx_, ctx_->sqr(bits_)}; }
  unsigned trace() const { return ctx_->trace(bits_); }

  FieldElem& operator+=(const FieldElem& o);
  FieldElem& operator*=(const FieldElem& o);

  friend FieldElem operator+(FieldElem a, const FieldElem& b) { return a += b; }
  friend FieldElem operator-(FieldElem a, const FieldElem& b) { return a += b; }
  friend FieldElem operator*(FieldElem a, const FieldElem& b) { return a *= b; }
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inv(); }
  friend bool operator==(const FieldElem& a, const FieldElem& b);
  friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

  /// "F4:2" for j: field name, colon, hexadecimal coordinates (MSB first).
  std::string to_string() const { return ctx_->format(bits_); }

 private:
  const FieldCtx* ctx_;
  uint64_t bits_;
};

/// Raw embedding F_{2^from} -> F_{2^to}. The system of embeddings is
/// compatible: embed(to<-mid) o embed(mid<-from) == embed(to<-from).
uint64_t embed_bits(uint64_t bits, unsigned from, unsigned to);
/// Preimage under the embedding, if the element lies in the subfield.
std::optional<uint64_t> descend_bits(uint64_t bits, unsigned from, unsigned to);

/// Throws NoEmbedding unless a's degree divides target's degree.
FieldElem embed(const FieldElem& a, const FieldCtx& target);
std::optional<FieldElem> descend(const FieldElem& a, const FieldCtx& sub);

/// Parses "F<q>:<hex>"; the element is embedded into ctx when q is a proper
/// subfield size.
FieldElem parse_field_literal(std::string_view text, const FieldCtx& ctx);

/// The image of j (root of t^2+t+1) in ctx; ctx must have even degree.
FieldElem cube_root_of_unity(const FieldCtx& ctx);

}  // namespace cbundle
