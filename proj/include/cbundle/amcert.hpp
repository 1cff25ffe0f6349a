#pragma once

// Artin–Mumford hypothesis checks for conic bundles over P^2 in
// characteristic 2: discriminant components, non-product witnesses, the
// five-condition surface criterion with a replayable JSON certificate,
// the elementary-transformation chart computation, and template search.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cbundle/conic.hpp"
#include "cbundle/geom.hpp"
#include "json.hpp"

namespace cbundle {

using FactorList = std::vector<std::pair<Poly, int>>;

/// Components of the discriminant with multiplicities. Claimed factors are
/// checked (product equals Δ up to a nonzero scalar, each absolutely
/// irreducible); without them Δ is factored from scratch.
/// FactorizationMismatch, NotAbsolutelyIrreducible, NotGenericallySmooth.
FactorList component_factorization(const ConicBundleSpec& s,
                                   const std::optional<std::vector<Poly>>& claimed = std::nullopt);

enum class AmStatus { DoubleLineWitness, CrossesWithNonProductWitness, NotCertified };
std::string am_status_name(AmStatus s);

struct CriterionOptions {
  unsigned k_max = kDefaultKMax;
  unsigned witness_degree = 8;  // largest F_{2^k} scanned for non-product witnesses
};

struct ComponentAnalysis {
  Poly component;
  AmStatus status = AmStatus::NotCertified;
  std::optional<ProjPoint> witness;
  bool inside_sigma = false;            // the whole component has double-line fibers
  std::vector<ProjPoint> sigma_points;  // Σ ∩ D when finite
  std::vector<ProjPoint> singular_points;
  bool sing_in_sigma = false;
};

/// NotAComponent unless the component divides Δ.
ComponentAnalysis am_component_check(const ConicBundleSpec& s, const Poly& component, const CriterionOptions& opt = {});

/// First smooth point of the component (over F_{2^k}, k <= max_degree, in
/// enumeration order) whose cross fiber has lines conjugate over its residue
/// field. InvalidInput if the component lies inside Σ.
std::optional<ProjPoint> nonproduct_witness(const ConicBundleSpec& s, const Poly& component, unsigned max_degree = 8);

struct Certificate {
  nlohmann::json json;
  std::array<bool, 5> hypotheses{};
  bool all_pass = false;

  std::string dump() const { return json.dump(2) + "\n"; }
};

/// Runs hypotheses (1)–(5) of the surface criterion. Sub-errors are recorded
/// in the certificate and fail the hypothesis that needed them.
Certificate surface_criterion(const ConicBundleSpec& s, const std::optional<std::vector<Poly>>& claimed,
                              const CriterionOptions& opt = {});

/// Recomputes a certificate from its embedded spec and configuration and
/// compares the two byte for byte.
bool replay_certificate(const nlohmann::json& cert);

struct TransformResult {
  int order;
  Poly transformed;  // not divisible by t
};

/// Substitutes v -> t v for v in scaled_vars and divides out the exact power
/// of t. ZeroEquation for eq = 0.
TransformResult elementary_transform_chart(const Poly& eq, const std::vector<std::string>& scaled_vars,
                                           std::string_view t);

struct SearchTemplate {
  struct FreeEntry {
    Entry entry;
    Poly base;        // fixed part
    Poly multiplier;  // free part is multiplier * (form of this degree)
    int degree;
  };

  std::string name;
  const FieldCtx* ctx = nullptr;
  std::array<int, 3> degree_vector{};
  int value_degree = 0;
  std::array<std::optional<Poly>, 6> fixed;
  std::vector<FreeEntry> free;
  std::optional<Entry> determined;  // a diagonal entry solved from the target
  std::vector<Poly> target;
  std::vector<ProjPoint> sigma_points;  // required double-line locus, if given
};

SearchTemplate template_from_json(const nlohmann::json& j);

struct SearchOptions {
  uint64_t budget = 4096;  // candidates examined
  uint64_t seed = 0;       // 0 keeps the natural slot order
  unsigned jobs = 1;
  CriterionOptions criterion;
};

struct SearchHit {
  ConicBundleSpec spec;
  Certificate certificate;
};

struct SearchReport {
  std::vector<SearchHit> hits;
  uint64_t candidates_total = 0;  // saturates at UINT64_MAX
  uint64_t examined = 0;
  uint64_t passed_divisibility = 0;
  uint64_t passed_sigma = 0;
  bool budget_exhausted = false;
};

/// Enumerates the free coefficients by increasing weight, applies the
/// congruence (by construction), divisibility and Σ filters, and keeps the
/// candidates whose certificate passes. Empty target_components means the
/// template's own target.
SearchReport search_spieghiamolo(const SearchTemplate& t, const std::vector<Poly>& target_components,
                                 const SearchOptions& opt = {});

}  // namespace cbundle
