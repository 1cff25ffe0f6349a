#include "cbundle/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cbundle {

namespace detail {
const std::vector<CorpusEntry>& generated_corpus();
}

namespace {

Error schema(const std::string& what) { return Error(ErrorCode::InvalidInput, "spec: " + what); }

int get_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw schema(std::string("missing integer '") + key + "'");
  return j[key].get<int>();
}

}  // namespace

ConicBundleSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw schema("expected an object");
  const int k = get_int(j, "field_degree");
  if (k < 1 || k > 64) throw Error(ErrorCode::UnsupportedDegree, "field_degree " + std::to_string(k));
  const FieldCtx& F = field_new(static_cast<unsigned>(k));
  if (!j.contains("degree_vector") || !j["degree_vector"].is_array() || j["degree_vector"].size() != 3)
    throw schema("degree_vector must be a list of three integers");
  std::array<int, 3> dv{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j["degree_vector"][i].is_number_integer()) throw schema("degree_vector entries must be integers");
    dv[i] = j["degree_vector"][i].get<int>();
  }
  const int m = get_int(j, "value_degree");
  if (!j.contains("sections") || !j["sections"].is_object()) throw schema("missing 'sections'");
  std::array<std::string, 6> text;
  for (Entry e : kEntries) {
    const auto& sec = j["sections"];
    const std::string key = entry_name(e);
    if (!sec.contains(key)) {
      text[static_cast<std::size_t>(e)] = "0";
    } else if (sec[key].is_string()) {
      text[static_cast<std::size_t>(e)] = sec[key].get<std::string>();
    } else {
      throw schema("section '" + key + "' must be a string");
    }
  }
  for (const auto& [key, val] : j["sections"].items()) {
    (void)val;
    bool known = false;
    for (Entry e : kEntries) known = known || entry_name(e) == key;
    if (!known) throw schema("unknown section '" + key + "'");
  }
  ConicBundleSpec s = make_spec(F, dv, m, text, j.value("name", std::string{}));
  if (j.contains("claimed_factors")) s.claimed_factors = factors_from_json(j["claimed_factors"], F);
  return s;
}

nlohmann::json spec_to_json(const ConicBundleSpec& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["field_degree"] = s.ctx->degree();
  j["degree_vector"] = s.degree_vector;
  j["value_degree"] = s.value_degree;
  nlohmann::json sec = nlohmann::json::object();
  for (Entry e : kEntries) sec[entry_name(e)] = s.s(e).to_string();
  j["sections"] = sec;
  if (s.claimed_factors) {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& p : *s.claimed_factors) f.push_back(p.to_string());
    j["claimed_factors"] = f;
  }
  return j;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

ConicBundleSpec load_spec(const std::string& path) { return spec_from_json(load_json(path)); }

std::vector<Poly> factors_from_json(const nlohmann::json& j, const FieldCtx& ctx) {
  const nlohmann::json& list = j.is_object() && j.contains("claimed_factors") ? j["claimed_factors"] : j;
  if (!list.is_array()) throw schema("claimed factors must be a list of strings");
  std::vector<Poly> out;
  for (const auto& f : list) {
    if (!f.is_string()) throw schema("claimed factors must be strings");
    out.push_back(parse_poly(f.get<std::string>(), ctx, xyz_vars()));
  }
  return out;
}

std::string spec_hash(const ConicBundleSpec& s) {
  nlohmann::json j = spec_to_json(s);
  j.erase("name");
  j.erase("claimed_factors");
  const std::string text = j.dump();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<CorpusEntry>& builtin_corpus() { return detail::generated_corpus(); }

nlohmann::json corpus_json(const std::string& file) {
  for (const auto& e : builtin_corpus())
    if (e.file == file) return nlohmann::json::parse(e.text);
  throw Error(ErrorCode::InvalidInput, "no corpus entry " + file);
}

}  // namespace cbundle
