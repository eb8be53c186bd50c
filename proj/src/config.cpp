#include "wedgelab/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace wedgelab {

using nlohmann::json;

namespace {

const json& need(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(where + ": missing field '" + key + "'");
  return j.at(key);
}

double need_number(const json& j, const std::string& key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
  return v.get<double>();
}

Vector2d need_vec2(const json& j, const std::string& key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ValidationError(where + "." + key + ": expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  if (!doc.is_object()) throw ValidationError("config: expected a JSON object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    throw ValidationError("config: missing integer 'schema_version'");
  cfg.schema_version = doc["schema_version"].get<int>();
  if (cfg.schema_version != 1) throw ValidationError("config.schema_version: unsupported version");
  const json& sc = need(doc, "scenario", "config");
  if (!sc.is_string()) throw ValidationError("config.scenario: expected a string");
  cfg.scenario = sc.get<std::string>();
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      throw ValidationError("config.seed: expected an integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("workers")) {
    if (!doc["workers"].is_number_integer() || doc["workers"].get<int>() < 1)
      throw ValidationError("config.workers: expected a positive integer");
    cfg.workers = doc["workers"].get<int>();
  }
  cfg.raw = std::move(doc);
  cfg.base_dir = base_dir;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::string base = std::filesystem::path(path).parent_path().string();
  if (base.empty()) base = ".";
  return config_from_json_text(read_file(path), base);
}

bool has_section(const ExperimentConfig& cfg, const std::string& name) {
  return cfg.raw.contains(name) || cfg.raw.contains(name + "_file");
}

json resolve_section(const ExperimentConfig& cfg, const std::string& name) {
  const bool inline_present = cfg.raw.contains(name);
  const bool file_present = cfg.raw.contains(name + "_file");
  if (inline_present && file_present)
    throw ValidationError("config." + name + ": give either inline or _file, not both");
  if (inline_present) return cfg.raw.at(name);
  if (!file_present) throw ValidationError("config." + name + ": section missing");
  const json& ref = cfg.raw.at(name + "_file");
  if (!ref.is_string()) throw ValidationError("config." + name + "_file: expected a path string");
  std::filesystem::path p = ref.get<std::string>();
  if (p.is_relative()) p = std::filesystem::path(cfg.base_dir) / p;
  json out;
  try {
    out = json::parse(read_file(p.string()));
  } catch (const json::exception& e) {
    throw ValidationError("config." + name + "_file: invalid JSON in " + p.string() + ": " +
                          e.what());
  }
  return out;
}

WedgeSpec wedge_from_json(const json& j, const std::string& where) {
  double zeta = need_number(j, "zeta", where);
  const bool by_vectors = j.contains("g1") || j.contains("g2");
  const bool by_angles = j.contains("zeta1") || j.contains("zeta2");
  if (by_vectors && by_angles)
    throw ValidationError(where + ": give g1/g2 or zeta1/zeta2, not both");
  try {
    if (by_vectors)
      return WedgeSpec::from_vectors(zeta, need_vec2(j, "g1", where), need_vec2(j, "g2", where));
    return WedgeSpec::from_angles(zeta, need_number(j, "zeta1", where),
                                  need_number(j, "zeta2", where));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

json wedge_to_json(const WedgeSpec& spec) {
  json j;
  j["zeta"] = spec.zeta;
  j["g1"] = {spec.g1.x(), spec.g1.y()};
  j["g2"] = {spec.g2.x(), spec.g2.y()};
  return j;
}

DomainSpec domain_from_json(const json& j, const std::string& where) {
  std::string kind = need(j, "kind", where).get<std::string>();
  WedgeSpec wedge = wedge_from_json(need(j, "wedge", where), where + ".wedge");
  try {
    if (kind == "exact_wedge") return DomainSpec::exact(wedge);
    if (kind == "perturbed_wedge")
      return DomainSpec::perturbed(wedge, need_number(j, "bump1", where),
                                   need_number(j, "bump2", where), need_number(j, "c_D", where),
                                   need_number(j, "r_D", where));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
  throw ValidationError(where + ".kind: expected exact_wedge or perturbed_wedge");
}

Coefficients coefficients_from_json(const json& j, const std::string& where) {
  Coefficients c;
  if (j.contains("drift")) {
    const json& d = j.at("drift");
    std::string kind = need(d, "kind", where + ".drift").get<std::string>();
    if (kind == "zero") {
      c.drift_kind = Coefficients::Drift::zero;
    } else if (kind == "constant") {
      c.drift_kind = Coefficients::Drift::constant;
      c.b0 = need_vec2(d, "value", where + ".drift");
    } else if (kind == "linear") {
      c.drift_kind = Coefficients::Drift::linear;
      c.b0 = need_vec2(d, "value", where + ".drift");
      const json& m = need(d, "matrix", where + ".drift");
      if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 ||
          !m[1].is_array() || m[1].size() != 2)
        throw ValidationError(where + ".drift.matrix: expected a 2x2 array");
      c.B << m[0][0].get<double>(), m[0][1].get<double>(), m[1][0].get<double>(),
          m[1][1].get<double>();
    } else {
      throw ValidationError(where + ".drift.kind: expected zero, constant or linear");
    }
  }
  if (j.contains("sigma")) {
    const json& s = j.at("sigma");
    std::string kind = need(s, "kind", where + ".sigma").get<std::string>();
    if (kind == "identity") {
      c.sigma_kind = Coefficients::Sigma::identity;
    } else if (kind == "isotropic_affine") {
      c.sigma_kind = Coefficients::Sigma::isotropic_affine;
      c.sigma_slope = need_number(s, "slope", where + ".sigma");
      c.sigma_cap = need_number(s, "cap", where + ".sigma");
    } else {
      throw ValidationError(where + ".sigma.kind: expected identity or isotropic_affine");
    }
  }
  c.lipschitz_bound = j.contains("lipschitz_bound")
                          ? need_number(j, "lipschitz_bound", where)
                          : (c.b0.norm() + c.B.norm() + std::abs(c.sigma_slope) + 1.0);
  try {
    validate_coefficients(c);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return c;
}

SimScaling scaling_from_json(const json& j, const std::string& where) {
  SimScaling s;
  if (j.contains("h_factor")) s.h_factor = need_number(j, "h_factor", where);
  if (j.contains("eta_factor")) s.eta_factor = need_number(j, "eta_factor", where);
  if (j.contains("max_steps")) {
    if (!j.at("max_steps").is_number_integer())
      throw ValidationError(where + ".max_steps: expected an integer");
    s.max_steps = j.at("max_steps").get<long>();
  }
  if (!(s.h_factor > 0.0) || !(s.eta_factor > 0.0) || s.eta_factor >= 1.0 || s.max_steps < 1)
    throw ValidationError(where + ": scaling values out of range");
  return s;
}

ShellLadder ladder_from_json(const json& j, const std::string& where) {
  ShellLadder l;
  if (j.contains("delta_star")) l.delta_star = need_number(j, "delta_star", where);
  if (j.contains("n_max")) l.n_max = need(j, "n_max", where).get<int>();
  if (j.contains("m")) l.m = need(j, "m", where).get<int>();
  if (!(l.delta_star > 0.0) || l.n_max < 0 || l.m < 1 || l.m > 120)
    throw ValidationError(where + ": ladder values out of range");
  return l;
}

}  // namespace wedgelab
