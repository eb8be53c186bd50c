#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "wedgelab/domain.hpp"
#include "wedgelab/sim.hpp"

namespace wedgelab {

// Parsed experiment description. Scenario-specific sections stay as JSON and
// are decoded by the scenario runners; wedge/domain sections may be given
// inline or as file references relative to the config's directory.
struct ExperimentConfig {
  int schema_version = 1;
  std::string scenario;
  std::uint64_t seed = 0;
  int workers = 1;
  nlohmann::json raw;
  std::string base_dir;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text, const std::string& base_dir);

// Section decoders; `where` prefixes every error with the offending field path.
WedgeSpec wedge_from_json(const nlohmann::json& j, const std::string& where);
DomainSpec domain_from_json(const nlohmann::json& j, const std::string& where);
Coefficients coefficients_from_json(const nlohmann::json& j, const std::string& where);
SimScaling scaling_from_json(const nlohmann::json& j, const std::string& where);
ShellLadder ladder_from_json(const nlohmann::json& j, const std::string& where);

// Resolves "<name>" (inline object) or "<name>_file" (reference) within the
// config; throws with the field path when both or neither are present.
nlohmann::json resolve_section(const ExperimentConfig& cfg, const std::string& name);
bool has_section(const ExperimentConfig& cfg, const std::string& name);

nlohmann::json wedge_to_json(const WedgeSpec& spec);

}  // namespace wedgelab
