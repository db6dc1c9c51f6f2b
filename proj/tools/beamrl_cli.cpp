#include <exception>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beamrl/ablate.hpp"
#include "beamrl/config.hpp"
#include "beamrl/env.hpp"
#include "beamrl/train.hpp"

namespace {

using nlohmann::json;

std::vector<int> parse_int_list(const std::string& csv, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

// --<key> <value> flags mirroring every config key; applied after the file
void add_config_flags(CLI::App* cmd, std::vector<std::pair<std::string, std::string>>* overrides) {
  for (const std::string& key : beamrl::config_keys()) {
    cmd->add_option_function<std::string>(
        "--" + key,
        [overrides, key](const std::string& value) { overrides->emplace_back(key, value); });
  }
}

beamrl::RunConfig build_config(const std::string& config_path,
                               const std::vector<std::pair<std::string, std::string>>& overrides) {
  beamrl::RunConfig cfg;
  if (!config_path.empty()) cfg = beamrl::load_config_file(config_path);
  for (const auto& [key, value] : overrides) beamrl::apply_override(cfg, key, value);
  return cfg;
}

int run_train(const std::string& config_path,
              const std::vector<std::pair<std::string, std::string>>& overrides) {
  const beamrl::RunConfig cfg = build_config(config_path, overrides);
  std::cout << beamrl::kMetricsHeader << "\n";
  const beamrl::TrainResult res = beamrl::train(cfg, [](const beamrl::MetricsRow& row) {
    std::cout << beamrl::format_metrics_row(row) << "\n" << std::flush;
  });
  json summary{{"metrics", res.metrics_path},
               {"checkpoint", res.checkpoint_path},
               {"manifest", res.manifest_path},
               {"real_env_steps", res.ledger.real_env_steps},
               {"rollout_env_steps", res.ledger.rollout_env_steps}};
  if (!res.rows.empty()) {
    summary["final_eval_mean"] = res.rows.back().eval_return_mean;
    summary["final_eval_std"] = res.rows.back().eval_return_std;
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_eval(const std::string& checkpoint, const std::string& env_name, int episodes,
             std::uint64_t seed, bool with_beam) {
  const beamrl::Td3Agent agent = beamrl::load_agent_checkpoint(checkpoint);
  const auto env = beamrl::make_env(env_name, beamrl::ResetMode::Train);
  beamrl::EvalResult er;
  if (with_beam) {
    beamrl::RunConfig defaults;
    defaults.resolve_noise_scales(env->spec().action_max);
    er = beamrl::evaluate_with_planner(agent, *env, episodes, seed, defaults.mcbs,
                                       defaults.td3);
  } else {
    er = beamrl::evaluate(agent, *env, episodes, seed);
  }
  std::cout << json{{"env", env_name},
                    {"episodes", episodes},
                    {"seed", seed},
                    {"eval_return_mean", er.mean},
                    {"eval_return_std", er.stddev}}
                   .dump()
            << "\n";
  return 0;
}

int run_ablate(const std::string& config_path,
               const std::vector<std::pair<std::string, std::string>>& overrides,
               const std::string& beams_csv, const std::string& depths_csv) {
  const beamrl::RunConfig cfg = build_config(config_path, overrides);
  const auto beams = parse_int_list(beams_csv, "--beams");
  const auto depths = parse_int_list(depths_csv, "--depths");
  const auto rows = beamrl::ablate(cfg, beams, depths);
  std::cout << beamrl::kAblationHeader << "\n";
  for (const auto& row : rows) std::cout << beamrl::format_ablation_row(row) << "\n";
  std::cout << json{{"grid", cfg.out_dir + "/ablation.csv"}}.dump() << "\n";
  return 0;
}

int run_describe(const std::string& env_name) {
  const auto env = beamrl::make_env(env_name, beamrl::ResetMode::Train);
  const beamrl::EnvSpec& spec = env->spec();
  std::cout << json{{"name", spec.name},
                    {"obs_dim", spec.obs_dim},
                    {"action_dim", spec.action_dim},
                    {"action_max", spec.action_max},
                    {"max_episode_steps", spec.max_episode_steps},
                    {"reward_bound", spec.reward_bound}}
                   .dump()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-control RL toolkit: TD3 with beam-search action selection"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  auto* train_cmd = app.add_subcommand("train", "Run one training job");
  train_cmd->add_option("--config", config_path, "key=value config file");
  add_config_flags(train_cmd, &overrides);

  std::string checkpoint, eval_env = "pendulum-swingup";
  int episodes = 10;
  std::uint64_t seed = 1;
  bool with_beam = false;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint, "agent checkpoint file")->required();
  eval_cmd->add_option("--env", eval_env, "environment name")->required();
  eval_cmd->add_option("--episodes", episodes, "evaluation episodes");
  eval_cmd->add_option("--seed", seed, "evaluation seed");
  eval_cmd->add_flag("--eval-with-beam", with_beam, "use the beam planner during evaluation");

  std::string beams_csv = "1,6,18", depths_csv = "1,3,6";
  auto* ablate_cmd = app.add_subcommand("ablate", "Beam-width / rollout-depth grid");
  ablate_cmd->add_option("--config", config_path, "key=value config file");
  ablate_cmd->add_option("--beams", beams_csv, "comma-separated beam widths");
  ablate_cmd->add_option("--depths", depths_csv, "comma-separated rollout depths");
  add_config_flags(ablate_cmd, &overrides);

  std::string describe_env;
  auto* describe_cmd = app.add_subcommand("describe", "Print an environment spec");
  describe_cmd->add_option("--env", describe_env, "environment name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return run_train(config_path, overrides);
    if (eval_cmd->parsed()) return run_eval(checkpoint, eval_env, episodes, seed, with_beam);
    if (ablate_cmd->parsed()) return run_ablate(config_path, overrides, beams_csv, depths_csv);
    if (describe_cmd->parsed()) return run_describe(describe_env);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
