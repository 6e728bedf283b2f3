#include "swarmcso/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swarmcso/errors.hpp"

namespace swarmcso {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n_agents",      "n_targets",        "groups",
      "n_steps",       "dt",               "q_diag",
      "sigma_r",       "sigma_phi",        "sigma_theta",
      "detect_scale",  "comm_divisor",     "comm_divisor_alt",
      "a_k",           "b_k",              "seesaw_iters",
      "agent_speed",   "target_step",      "target_vert_range",
      "init_cube_halfwidth", "seed",       "determinant_form_gradient",
      "median_mode",
  };
  return keys;
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

ScenarioConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& item : j.items()) {
    if (!known_keys().count(item.key())) throw ConfigError(item.key() + ": unknown key");
  }

  ScenarioConfig cfg;
  read_field(j, "n_agents", cfg.n_agents);
  read_field(j, "n_targets", cfg.n_targets);
  read_field(j, "groups", cfg.group_sizes);
  read_field(j, "n_steps", cfg.n_steps);
  read_field(j, "dt", cfg.dt);
  if (j.contains("q_diag")) {
    std::vector<double> q;
    read_field(j, "q_diag", q);
    if (q.size() != 6) throw ConfigError("q_diag: expected 6 entries");
    for (int i = 0; i < 6; ++i) cfg.q_diag[i] = q[static_cast<std::size_t>(i)];
  }
  read_field(j, "sigma_r", cfg.sigma_r);
  read_field(j, "sigma_phi", cfg.sigma_phi);
  read_field(j, "sigma_theta", cfg.sigma_theta);
  read_field(j, "detect_scale", cfg.detect_scale);
  read_field(j, "comm_divisor", cfg.comm_divisor);
  read_field(j, "comm_divisor_alt", cfg.comm_divisor_alt);
  read_field(j, "a_k", cfg.heading_step);
  read_field(j, "b_k", cfg.vertical_step);
  read_field(j, "seesaw_iters", cfg.seesaw_iters);
  read_field(j, "agent_speed", cfg.agent_speed);
  read_field(j, "target_step", cfg.target_step);
  read_field(j, "target_vert_range", cfg.target_vert_range);
  read_field(j, "init_cube_halfwidth", cfg.init_cube_halfwidth);
  read_field(j, "seed", cfg.seed);
  read_field(j, "determinant_form_gradient", cfg.determinant_form_gradient);
  if (j.contains("median_mode")) {
    std::string mode;
    read_field(j, "median_mode", mode);
    if (mode == "pooled") {
      cfg.median_mode = MedianMode::pooled;
    } else if (mode == "per_replication_mean") {
      cfg.median_mode = MedianMode::per_replication_mean;
    } else {
      throw ConfigError("median_mode: must be \"pooled\" or \"per_replication_mean\"");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ScenarioConfig parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return from_json(j);
}

std::string config_to_json(const ScenarioConfig& cfg, int indent) {
  json j;
  j["n_agents"] = cfg.n_agents;
  j["n_targets"] = cfg.n_targets;
  j["groups"] = cfg.group_sizes;
  j["n_steps"] = cfg.n_steps;
  j["dt"] = cfg.dt;
  j["q_diag"] = {cfg.q_diag[0], cfg.q_diag[1], cfg.q_diag[2],
                 cfg.q_diag[3], cfg.q_diag[4], cfg.q_diag[5]};
  j["sigma_r"] = cfg.sigma_r;
  j["sigma_phi"] = cfg.sigma_phi;
  j["sigma_theta"] = cfg.sigma_theta;
  j["detect_scale"] = cfg.detect_scale;
  j["comm_divisor"] = cfg.comm_divisor;
  j["comm_divisor_alt"] = cfg.comm_divisor_alt;
  j["a_k"] = cfg.heading_step;
  j["b_k"] = cfg.vertical_step;
  j["seesaw_iters"] = cfg.seesaw_iters;
  j["agent_speed"] = cfg.agent_speed;
  j["target_step"] = cfg.target_step;
  j["target_vert_range"] = cfg.target_vert_range;
  j["init_cube_halfwidth"] = cfg.init_cube_halfwidth;
  j["seed"] = cfg.seed;
  j["determinant_form_gradient"] = cfg.determinant_form_gradient;
  j["median_mode"] =
      cfg.median_mode == MedianMode::pooled ? "pooled" : "per_replication_mean";
  return j.dump(indent);
}

}  // namespace swarmcso
