#include "beamrl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace beamrl {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument("config: '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const long x = parse_long(key, item);
    if (x < 1) throw std::invalid_argument("config: '" + key + "' sizes must be positive");
    sizes.push_back(static_cast<std::size_t>(x));
  }
  if (sizes.empty()) throw std::invalid_argument("config: '" + key + "' needs at least one size");
  return sizes;
}

std::string render_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(sizes[i]);
  }
  return out;
}

}  // namespace

std::string to_string(Algorithm a) {
  return a == Algorithm::Td3 ? "td3" : "mcbs-td3";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "td3") return Algorithm::Td3;
  if (s == "mcbs-td3") return Algorithm::McbsTd3;
  throw std::invalid_argument("config: unknown algorithm '" + s + "' (td3 | mcbs-td3)");
}

void RunConfig::validate() const {
  if (total_steps < 0) throw std::invalid_argument("total_steps must be >= 0");
  if (eval_interval < 1) throw std::invalid_argument("eval_interval must be >= 1");
  if (total_steps > 0 && eval_interval > total_steps) {
    throw std::invalid_argument("eval_interval must not exceed total_steps");
  }
  if (eval_episodes < 1) throw std::invalid_argument("eval_episodes must be >= 1");
  if (replay_capacity < 1) throw std::invalid_argument("replay_capacity must be >= 1");
  td3.validate();
  mcbs.validate();
}

void RunConfig::resolve_noise_scales(double action_max) {
  if (td3.exploration_sigma < 0.0) td3.exploration_sigma = 0.1 * action_max;
  if (mcbs.beam_noise_sigma < 0.0) mcbs.beam_noise_sigma = 0.2 * action_max;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "env") cfg.env_name = v;
  else if (key == "algorithm") cfg.algorithm = algorithm_from_string(v);
  else if (key == "total_steps") cfg.total_steps = parse_long(key, v);
  else if (key == "eval_interval") cfg.eval_interval = parse_long(key, v);
  else if (key == "eval_episodes") cfg.eval_episodes = static_cast<int>(parse_long(key, v));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(key, v));
  else if (key == "out_dir") cfg.out_dir = v;
  else if (key == "replay_capacity") cfg.replay_capacity = parse_long(key, v);
  else if (key == "deterministic_timing") cfg.deterministic_timing = parse_bool(key, v);
  else if (key == "eval_with_beam") cfg.eval_with_beam = parse_bool(key, v);
  else if (key == "gamma") cfg.td3.gamma = parse_double(key, v);
  else if (key == "tau") cfg.td3.tau = parse_double(key, v);
  else if (key == "policy_delay") cfg.td3.policy_delay = static_cast<int>(parse_long(key, v));
  else if (key == "target_noise_sigma") cfg.td3.target_noise_sigma = parse_double(key, v);
  else if (key == "target_noise_clip") cfg.td3.target_noise_clip = parse_double(key, v);
  else if (key == "exploration_sigma") cfg.td3.exploration_sigma = parse_double(key, v);
  else if (key == "batch_size") cfg.td3.batch_size = static_cast<int>(parse_long(key, v));
  else if (key == "warmup_steps") cfg.td3.warmup_steps = parse_long(key, v);
  else if (key == "actor_lr") cfg.td3.actor_lr = parse_double(key, v);
  else if (key == "critic_lr") cfg.td3.critic_lr = parse_double(key, v);
  else if (key == "hidden_sizes") cfg.td3.hidden_sizes = parse_sizes(key, v);
  else if (key == "beam_width") cfg.mcbs.beam_width = static_cast<int>(parse_long(key, v));
  else if (key == "rollout_depth") cfg.mcbs.rollout_depth = static_cast<int>(parse_long(key, v));
  else if (key == "num_sims") cfg.mcbs.num_sims = static_cast<int>(parse_long(key, v));
  else if (key == "beam_noise_sigma") cfg.mcbs.beam_noise_sigma = parse_double(key, v);
  else if (key == "adaptive") cfg.mcbs.adaptive = parse_bool(key, v);
  else if (key == "saturation_window") {
    cfg.mcbs.saturation_window = static_cast<int>(parse_long(key, v));
  } else if (key == "saturation_epsilon") {
    cfg.mcbs.saturation_epsilon = parse_double(key, v);
  } else if (key == "min_beam_interval") {
    cfg.mcbs.min_beam_interval = parse_long(key, v);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not key=value: '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    apply_override(cfg, key, value);
  }
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& cfg) {
  return {
      {"env", cfg.env_name},
      {"algorithm", to_string(cfg.algorithm)},
      {"total_steps", std::to_string(cfg.total_steps)},
      {"eval_interval", std::to_string(cfg.eval_interval)},
      {"eval_episodes", std::to_string(cfg.eval_episodes)},
      {"seed", std::to_string(cfg.seed)},
      {"out_dir", cfg.out_dir},
      {"replay_capacity", std::to_string(cfg.replay_capacity)},
      {"deterministic_timing", cfg.deterministic_timing ? "true" : "false"},
      {"eval_with_beam", cfg.eval_with_beam ? "true" : "false"},
      {"gamma", fmt_double(cfg.td3.gamma)},
      {"tau", fmt_double(cfg.td3.tau)},
      {"policy_delay", std::to_string(cfg.td3.policy_delay)},
      {"target_noise_sigma", fmt_double(cfg.td3.target_noise_sigma)},
      {"target_noise_clip", fmt_double(cfg.td3.target_noise_clip)},
      {"exploration_sigma", fmt_double(cfg.td3.exploration_sigma)},
      {"batch_size", std::to_string(cfg.td3.batch_size)},
      {"warmup_steps", std::to_string(cfg.td3.warmup_steps)},
      {"actor_lr", fmt_double(cfg.td3.actor_lr)},
      {"critic_lr", fmt_double(cfg.td3.critic_lr)},
      {"hidden_sizes", render_sizes(cfg.td3.hidden_sizes)},
      {"beam_width", std::to_string(cfg.mcbs.beam_width)},
      {"rollout_depth", std::to_string(cfg.mcbs.rollout_depth)},
      {"num_sims", std::to_string(cfg.mcbs.num_sims)},
      {"beam_noise_sigma", fmt_double(cfg.mcbs.beam_noise_sigma)},
      {"adaptive", cfg.mcbs.adaptive ? "true" : "false"},
      {"saturation_window", std::to_string(cfg.mcbs.saturation_window)},
      {"saturation_epsilon", fmt_double(cfg.mcbs.saturation_epsilon)},
      {"min_beam_interval", std::to_string(cfg.mcbs.min_beam_interval)},
  };
}

std::string render_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_items(cfg)) {
    out += k;
    out += "=";
    out += v;
    out += "\n";
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> ks;
    for (const auto& [k, v] : config_items(RunConfig{})) ks.push_back(k);
    return ks;
  }();
  return keys;
}

}  // namespace beamrl
