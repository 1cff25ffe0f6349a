#pragma once

// Conic bundles over the projective plane: the six coefficient sections of
// s_aa a^2 + s_bb b^2 + s_cc c^2 + s_ab ab + s_ac ac + s_bc bc, with base
// coordinates x, y, z and fiber coordinates a, b, c.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cbundle/poly.hpp"

namespace cbundle {

enum class Entry { AA, AB, AC, BB, BC, CC };
inline constexpr std::array<Entry, 6> kEntries = {Entry::AA, Entry::AB, Entry::AC, Entry::BB, Entry::BC, Entry::CC};
std::string entry_name(Entry e);  // "aa", "ab", ...
/// Fiber coordinate indices (0 = a, 1 = b, 2 = c) of an entry.
std::pair<int, int> entry_indices(Entry e);
Entry entry_of(int i, int j);

/// A point of the plane with coordinates normalized so the first nonzero one
/// is 1. Equality compares after embedding into a common field.
class ProjPoint {
 public:
  ProjPoint(const FieldCtx& ctx, std::array<uint64_t, 3> coords);
  ProjPoint(const FieldElem& x, const FieldElem& y, const FieldElem& z);

  const FieldCtx& ctx() const noexcept { return *ctx_; }
  uint64_t bits(std::size_t i) const noexcept { return c_[i]; }
  FieldElem coord(std::size_t i) const { return {*ctx_, c_[i]}; }
  std::array<FieldElem, 3> coords() const { return {coord(0), coord(1), coord(2)}; }

  /// The same point over the smallest field containing its coordinates.
  ProjPoint minimal() const;
  ProjPoint embedded(const FieldCtx& target) const;

  /// "[0:1:0]" with 0 and 1 written plainly, other entries as field literals.
  std::string to_string() const;
  std::vector<std::string> serialize() const;

  friend bool operator==(const ProjPoint& a, const ProjPoint& b);
  friend bool operator!=(const ProjPoint& a, const ProjPoint& b) { return !(a == b); }
  /// Canonical order: field degree, then coordinates.
  friend bool operator<(const ProjPoint& a, const ProjPoint& b);

 private:
  const FieldCtx* ctx_;
  std::array<uint64_t, 3> c_;
};

/// Smallest field containing both F_{2^a} and F_{2^b}; ExtensionBound past 64.
const FieldCtx& common_field(unsigned a, unsigned b);

/// f(p) in the common field of f's coefficients and p.
FieldElem evaluate_at(const Poly& f, const ProjPoint& p);

/// Parses "x:y:z" where each entry is a constant literal (0, 1, j, F16:a).
/// The point lives in F_{2^k} for the given k, or the smallest field that
/// contains the literals when k = 0.
ProjPoint parse_point(std::string_view text, unsigned k = 0);

enum class FiberType { Smooth, Cross, DoubleLine, NotConic };
std::string fiber_type_name(FiberType t);

struct ConicBundleSpec {
  const FieldCtx* ctx;
  std::array<int, 3> degree_vector;  // e_a, e_b, e_c
  int value_degree;                  // m
  std::vector<Poly> sections;        // indexed by Entry
  std::optional<std::vector<Poly>> claimed_factors;
  std::string name;

  const Poly& s(Entry e) const { return sections[static_cast<std::size_t>(e)]; }
  const Poly& s(int i, int j) const { return s(entry_of(i, j)); }
  int expected_degree(Entry e) const;
  /// Degrees twisted so the smallest e_i is zero (m changes by -2t).
  std::pair<std::array<int, 3>, int> normalized_degrees() const;
};

/// Builds a spec from section strings in the polynomial grammar.
ConicBundleSpec make_spec(const FieldCtx& ctx, std::array<int, 3> degree_vector, int value_degree,
                          const std::array<std::string, 6>& sections, std::string name = {});

struct ValidationReport {
  int discriminant_degree;  // forced by the degree vector
};

/// DegreeMismatch naming the section, or AllZero.
ValidationReport spec_validate(const ConicBundleSpec& s);

Poly discriminant(const ConicBundleSpec& s);

/// (s_ab, s_ac, s_bc): the double-line locus is their common zero set.
std::array<Poly, 3> sigma_generators(const ConicBundleSpec& s);

FiberType classify_fiber(const ConicBundleSpec& s, const ProjPoint& p);

/// Section values at p, indexed by Entry, in the common field.
std::vector<FieldElem> section_values(const ConicBundleSpec& s, const ProjPoint& p);

/// Vertex of a singular conic given by section values: (s_bc, s_ac, s_ab).
std::array<FieldElem, 3> cross_vertex(const std::vector<FieldElem>& values);

/// Chart variable layouts.
const Vars& fiber_vars();  // a, b, c
const Vars& total_vars();  // x, y, z, a, b, c

/// The conic form as a polynomial in x, y, z, a, b, c.
Poly conic_form(const ConicBundleSpec& s);

struct ChartEquation {
  char base;   // dehomogenized base variable
  char fiber;  // dehomogenized fiber variable
  Poly equation;
  std::string id() const { return std::string{base, '=', '1', ',', fiber, '=', '1'}; }
};

std::vector<ChartEquation> total_space_charts(const ConicBundleSpec& s);
ChartEquation total_space_chart(const ConicBundleSpec& s, char base, char fiber);

struct FlatnessReport {
  bool flat = false;
  bool generically_smooth = false;
  std::optional<ProjPoint> witness;  // common zero of all sections
};

/// Never throws for a valid spec; elimination errors propagate.
FlatnessReport flatness_report(const ConicBundleSpec& s, unsigned k_max = 24);
/// Throws NotFlat (with witness) or NotGenericallySmooth.
FlatnessReport flatness_check(const ConicBundleSpec& s, unsigned k_max = 24);

}  // namespace cbundle
