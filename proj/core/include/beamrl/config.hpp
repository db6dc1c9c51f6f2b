#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "beamrl/mcbs.hpp"
#include "beamrl/td3.hpp"

namespace beamrl {

enum class Algorithm { Td3, McbsTd3 };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

// Flat key=value configuration; every key can also be set by the CLI flag of
// the same name. Keys are listed in the README.
struct RunConfig {
  std::string env_name = "pendulum-swingup";
  Algorithm algorithm = Algorithm::McbsTd3;
  long total_steps = 150000;
  long eval_interval = 2000;
  int eval_episodes = 10;
  std::uint64_t seed = 1;
  std::string out_dir = "runs/out";
  long replay_capacity = 200000;
  bool deterministic_timing = false;  // write wall_seconds as 0 for file-equality checks
  bool eval_with_beam = false;        // planner-in-the-loop evaluation

  Td3Config td3;
  McbsConfig mcbs;

  void validate() const;
  // negative noise scales resolve to their action_max-relative defaults
  void resolve_noise_scales(double action_max);
};

RunConfig load_config_file(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// key/value view of a config, in stable order; doubles rendered so they
// round-trip exactly
std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& cfg);
std::string render_config(const RunConfig& cfg);
const std::vector<std::string>& config_keys();

}  // namespace beamrl
