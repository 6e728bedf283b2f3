#pragma once

#include <string>

#include "swarmcso/world.hpp"

namespace swarmcso {

/// Parse a JSON scenario config. Absent fields take the defaults; unknown keys
/// and constraint violations raise ConfigError naming the field.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& json_text);

/// Full config echo, inverse of parse_config_text.
std::string config_to_json(const ScenarioConfig& cfg, int indent = 2);

}  // namespace swarmcso
