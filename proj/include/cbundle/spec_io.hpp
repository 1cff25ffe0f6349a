#pragma once

// JSON spec files and the built-in example corpus.
//
//   {"name": "...", "field_degree": 1, "degree_vector": [0, 1, 3],
//    "value_degree": 0, "sections": {"aa": "1", "ab": "x", ...},
//    "claimed_factors": ["x^3*z + y^4", ...]}
//
// Missing sections are zero. Unknown top-level keys are ignored; unknown
// section keys are errors.

#include <string>
#include <vector>

#include "cbundle/conic.hpp"
#include "json.hpp"

namespace cbundle {

/// InvalidInput on schema errors; ParseError from the polynomial grammar.
ConicBundleSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ConicBundleSpec& s);

ConicBundleSpec load_spec(const std::string& path);
nlohmann::json load_json(const std::string& path);

/// Accepts a list of strings or an object with "claimed_factors".
std::vector<Poly> factors_from_json(const nlohmann::json& j, const FieldCtx& ctx);

/// FNV-1a 64 of the canonical JSON form without name and claimed factors,
/// as "fnv1a64:<16 hex digits>".
std::string spec_hash(const ConicBundleSpec& s);

struct CorpusEntry {
  std::string file;  // e.g. "ex1.json"
  std::string text;
};

/// The corpus/ directory as compiled into the library.
const std::vector<CorpusEntry>& builtin_corpus();
nlohmann::json corpus_json(const std::string& file);

}  // namespace cbundle
