// Acceptance battery: one pass/fail line per criterion. Run with no
// arguments for the full suite or pass criterion numbers to run a subset,
// e.g. `acceptance 1 2 4 8 9`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "beamrl/ablate.hpp"
#include "beamrl/config.hpp"
#include "beamrl/mcbs.hpp"
#include "beamrl/train.hpp"
#include "support/oracles.hpp"
#include "support/stub_envs.hpp"

using namespace beamrl;
using namespace beamrl::testing;

namespace {

int g_failures = 0;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s | %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run_criterion(int id, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& fn) {
  try {
    const auto [pass, detail] = fn();
    report(id, name, pass, detail);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

std::string out_root() {
  static const std::string root = [] {
    const auto dir = std::filesystem::temp_directory_path() / "beamrl_acceptance";
    std::filesystem::create_directories(dir);
    return dir.string();
  }();
  return root;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// shared desk-scale run configurations

RunConfig desk_config(const std::string& env, long total_steps, long eval_interval,
                      std::uint64_t seed, const std::string& tag) {
  RunConfig cfg;
  cfg.env_name = env;
  cfg.total_steps = total_steps;
  cfg.eval_interval = eval_interval;
  cfg.eval_episodes = 10;
  cfg.seed = seed;
  cfg.out_dir = out_root() + "/" + tag;
  cfg.deterministic_timing = false;
  cfg.td3.hidden_sizes = {32, 32};
  cfg.td3.batch_size = 128;
  cfg.td3.warmup_steps = 1000;
  return cfg;
}

struct RunOutcome {
  long steps_to_90 = 0;
  double final_mean = 0.0;
  double wall = 0.0;
};

RunOutcome run_once(RunConfig cfg, long total_steps_for_sentinel) {
  const TrainResult res = train(cfg);
  RunOutcome out;
  const long s90 = steps_to_fraction(res.rows, 0.9);
  out.steps_to_90 = (s90 == kNotReached) ? total_steps_for_sentinel + 1 : s90;
  out.final_mean = res.rows.back().eval_return_mean;
  out.wall = res.rows.back().wall_seconds;
  return out;
}

// Five-seed batteries shared between criteria 5 and 6.
struct Battery {
  std::vector<RunOutcome> td3, mcbs;
  double wall_total = 0.0;
};

Battery run_battery(const std::string& env, long total_steps, long eval_interval,
                    const std::vector<std::uint64_t>& seeds, const std::string& tag) {
  Battery b;
  for (const std::uint64_t seed : seeds) {
    RunConfig td3_cfg = desk_config(env, total_steps, eval_interval, seed,
                                    tag + "_td3_s" + std::to_string(seed));
    td3_cfg.algorithm = Algorithm::Td3;
    const RunOutcome rt = run_once(td3_cfg, total_steps);
    b.td3.push_back(rt);
    b.wall_total += rt.wall;
    std::printf("  [%s] td3  seed=%llu steps_to_90=%ld final=%.2f wall=%.0fs\n", tag.c_str(),
                static_cast<unsigned long long>(seed), rt.steps_to_90, rt.final_mean, rt.wall);
    std::fflush(stdout);

    RunConfig mcbs_cfg = desk_config(env, total_steps, eval_interval, seed,
                                     tag + "_mcbs_s" + std::to_string(seed));
    mcbs_cfg.algorithm = Algorithm::McbsTd3;  // B=6, D=3, N_sim=5 defaults
    const RunOutcome rm = run_once(mcbs_cfg, total_steps);
    b.mcbs.push_back(rm);
    b.wall_total += rm.wall;
    std::printf("  [%s] mcbs seed=%llu steps_to_90=%ld final=%.2f wall=%.0fs\n", tag.c_str(),
                static_cast<unsigned long long>(seed), rm.steps_to_90, rm.final_mean, rm.wall);
    std::fflush(stdout);
  }
  return b;
}

const std::vector<std::uint64_t> kSeeds = {101, 102, 103, 104, 105};

std::optional<Battery>& pendulum_battery_cache() {
  static std::optional<Battery> cache;
  return cache;
}

const Battery& pendulum_battery() {
  auto& cache = pendulum_battery_cache();
  if (!cache) {
    std::printf("  running the pendulum battery (5 seeds x 2 algorithms x 150k steps)...\n");
    cache = run_battery("pendulum-swingup", 150000, 2000, kSeeds, "pend");
  }
  return *cache;
}

std::vector<double> finals_of(const std::vector<RunOutcome>& runs) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.final_mean);
  return v;
}

std::vector<double> s90_of(const std::vector<RunOutcome>& runs) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(static_cast<double>(r.steps_to_90));
  return v;
}

double pooled_std(const std::vector<double>& a, const std::vector<double>& b) {
  const double va = population_stddev(a), vb = population_stddev(b);
  return std::sqrt(0.5 * (va * va + vb * vb));
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// criteria

std::pair<bool, std::string> criterion1_gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(4242);
  double worst = 0.0;
  int checked = 0;
  while (checked < 50) {
    const int layers = 1 + static_cast<int>(rng.index(3));
    std::vector<std::size_t> sizes;
    for (int i = 0; i <= layers; ++i) sizes.push_back(1 + rng.index(8));
    Mlp net = make_mlp(sizes, Activation::Relu,
                       rng.uniform() < 0.5 ? Activation::Identity : Activation::Tanh);
    init_uniform_fan_in(net, rng);
    Vector input(net.input_size());
    for (double& x : input) x = rng.uniform(-1.0, 1.0);
    if (near_relu_kink(net, input)) continue;
    Vector upstream(net.output_size());
    for (double& x : upstream) x = rng.uniform(-1.0, 1.0);
    const FdReport r = finite_difference_check(net, input, upstream, 1e-5);
    worst = std::max(worst, r.max_rel_error);
    ++checked;
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst < 1e-4 && elapsed < 10.0;
  return {pass, "50 nets, worst rel err " + fmt(worst) + " (tol 1e-4), " + fmt(elapsed) + "s"};
}

std::pair<bool, std::string> criterion2_short_horizon_oracle() {
  RngStream agent_rng(1);
  Td3Config tcfg;
  tcfg.hidden_sizes = {4};
  tcfg.exploration_sigma = 0.0;
  EnvSpec spec{"linear-track", 1, 1, 1.0, 200, 25.0};
  Td3Agent agent = make_agent(spec, tcfg, agent_rng);
  for (Mlp* net : {&agent.actor, &agent.critic1, &agent.critic2}) {
    for (auto& l : net->weights) std::fill(l.begin(), l.end(), 0.0);
    for (auto& l : net->biases) std::fill(l.begin(), l.end(), 0.0);
  }

  auto env = make_env("linear-track", ResetMode::Test);
  RngStream reset_rng(2);
  env->reset(reset_rng);
  auto scratch = env->clone();
  const EnvSnapshot snap = env->snapshot();
  const PolicyFn policy = make_policy_fn(agent);
  const BootstrapFn bootstrap = make_twin_critic_bootstrap(agent);

  const double expected[] = {-0.81, -1.6119, -2.405781};
  double worst = 0.0;
  for (int depth = 1; depth <= 3; ++depth) {
    BudgetLedger ledger;
    RngStream rng(3);
    const double got = short_horizon(*scratch, snap, {-1.0}, depth, 0.99, 0.0, 1.0, policy,
                                     bootstrap, rng, ledger);
    worst = std::max(worst, std::abs(got - expected[depth - 1]));
  }
  return {worst < 1e-9, "D in {1,2,3}, worst abs err " + fmt(worst) + " (tol 1e-9)"};
}

std::pair<bool, std::string> criterion3_td3_reduction() {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig td3_cfg = desk_config("linear-track", 20000, 1000, 7, "red_td3");
  td3_cfg.algorithm = Algorithm::Td3;
  td3_cfg.eval_episodes = 5;
  td3_cfg.td3.exploration_sigma = 0.0;
  td3_cfg.deterministic_timing = true;

  RunConfig mcbs_cfg = td3_cfg;
  mcbs_cfg.out_dir = out_root() + "/red_mcbs";
  mcbs_cfg.algorithm = Algorithm::McbsTd3;
  mcbs_cfg.mcbs.beam_width = 1;
  mcbs_cfg.mcbs.beam_noise_sigma = 0.0;
  mcbs_cfg.mcbs.adaptive = false;

  const TrainResult rt = train(td3_cfg);
  const TrainResult rm = train(mcbs_cfg);
  const bool equal = slurp(rt.metrics_path) == slurp(rm.metrics_path);
  const double elapsed = seconds_since(t0);
  const bool pass = equal && elapsed < 120.0;
  return {pass, std::string("metrics files ") + (equal ? "identical" : "DIFFER") + ", " +
                    fmt(elapsed) + "s (bound 120s)"};
}

std::pair<bool, std::string> criterion4_budget_law() {
  EnvSpec spec{"stub", 1, 1, 1.0, 1000000, 100.0};
  RngStream agent_rng(11);
  Td3Config tcfg;
  tcfg.hidden_sizes = {4};
  tcfg.exploration_sigma = 0.1;
  Td3Agent agent = make_agent(spec, tcfg, agent_rng);

  long checked = 0;
  for (const bool terminal : {false, true}) {
    StubEnv live({.terminal_every_step = terminal});
    RngStream reset_rng(12);
    live.reset(reset_rng);
    for (int beam : {1, 6, 18}) {
      for (int depth : {1, 3, 6}) {
        for (int sims : {1, 5}) {
          McbsConfig cfg;
          cfg.beam_width = beam;
          cfg.rollout_depth = depth;
          cfg.num_sims = sims;
          cfg.beam_noise_sigma = 0.2;  // nonzero so a beam of one still plans
          cfg.adaptive = false;
          Planner planner(cfg, live);
          BudgetLedger ledger;
          RngStream beam_rng(13), rollout_rng(14), explore_rng(15);
          planner.plan(agent, live, 1, {}, tcfg, ledger, beam_rng, rollout_rng, explore_rng);
          const long expected = terminal ? static_cast<long>(beam) * sims
                                         : static_cast<long>(beam) * sims * depth;
          if (ledger.rollout_env_steps != expected) {
            return {false, "B=" + std::to_string(beam) + " D=" + std::to_string(depth) +
                               " N=" + std::to_string(sims) + " terminal=" +
                               std::to_string(terminal) + ": charged " +
                               std::to_string(ledger.rollout_env_steps) + ", expected " +
                               std::to_string(expected)};
          }
          ++checked;
        }
      }
    }
  }
  return {true, std::to_string(checked) + " grid cells charged exactly"};
}

std::pair<bool, std::string> criterion5_convergence_speed() {
  const Battery& b = pendulum_battery();
  const double med_td3 = median(s90_of(b.td3));
  const double med_mcbs = median(s90_of(b.mcbs));
  const double ratio = med_mcbs / med_td3;
  const bool weak = ratio <= 0.9;
  const bool strong = ratio <= 0.75;
  return {weak, "median steps-to-90%: mcbs " + fmt(med_mcbs) + " vs td3 " + fmt(med_td3) +
                    ", ratio " + fmt(ratio) + " | weak(<=0.9) " + (weak ? "PASS" : "FAIL") +
                    ", strong(<=0.75) " + (strong ? "PASS" : "FAIL") + " | battery wall " +
                    fmt(b.wall_total) + "s"};
}

std::pair<bool, std::string> criterion6_final_performance() {
  std::string detail;
  bool pass = true;
  const Battery pend = pendulum_battery();
  std::printf("  running the double-integrator battery (5 seeds x 2 x 50k steps)...\n");
  const Battery di = run_battery("double-integrator", 50000, 2000, kSeeds, "di");

  const auto check_env = [&](const std::string& name, const Battery& b) {
    const auto fm = finals_of(b.mcbs);
    const auto ft = finals_of(b.td3);
    const double mean_m = mean(fm), mean_t = mean(ft);
    const double sd = pooled_std(fm, ft);
    const double med_m = median(fm), med_t = median(ft);
    const bool within = mean_m >= mean_t - sd;
    const bool med_better = med_m > med_t;
    pass = pass && within && med_better;
    detail += name + ": mcbs mean " + fmt(mean_m) + " vs td3 " + fmt(mean_t) + " (pooled std " +
              fmt(sd) + ", " + (within ? "ok" : "VIOLATED") + "), median " + fmt(med_m) +
              " vs " + fmt(med_t) + (med_better ? " ok" : " VIOLATED") + "; ";
  };
  check_env("pendulum", pend);
  check_env("double-integrator", di);
  return {pass, detail};
}

std::pair<bool, std::string> criterion7_ablation_monotonicity() {
  const std::vector<std::uint64_t> seeds = {301, 302, 303};
  std::vector<double> b18, b6, td3;
  for (const std::uint64_t seed : seeds) {
    RunConfig base = desk_config("linear-track", 20000, 1000, seed,
                                 "abl_s" + std::to_string(seed));
    base.algorithm = Algorithm::McbsTd3;
    base.eval_episodes = 5;
    const auto rows = ablate(base, {6, 18}, {3});
    // rows: (6,3), (18,3), td3 baseline
    for (const auto& row : rows) {
      if (row.failed) return {false, "ablation cell failed at seed " + std::to_string(seed)};
      if (row.beam_width == 6 && row.rollout_depth == 3) b6.push_back(row.final_eval_mean);
      if (row.beam_width == 18 && row.rollout_depth == 3) b18.push_back(row.final_eval_mean);
      if (row.rollout_depth == 0) td3.push_back(row.final_eval_mean);
    }
    std::printf("  [ablate] seed=%llu done\n", static_cast<unsigned long long>(seed));
    std::fflush(stdout);
  }
  const double med18 = median(b18), med6 = median(b6), medt = median(td3);
  const double sd_18_6 = pooled_std(b18, b6);
  const double sd_6_t = pooled_std(b6, td3);
  const bool upper = med18 >= med6 - sd_18_6;
  const bool lower = med6 >= medt - sd_6_t;
  return {upper && lower,
          "medians: (B=18,D=3) " + fmt(med18) + " >= (B=6,D=3) " + fmt(med6) + " (tol " +
              fmt(sd_18_6) + ", " + (upper ? "ok" : "VIOLATED") + "); (B=6,D=3) " + fmt(med6) +
              " >= td3 " + fmt(medt) + " (tol " + fmt(sd_6_t) + ", " +
              (lower ? "ok" : "VIOLATED") + ")"};
}

std::pair<bool, std::string> criterion8_determinism_purity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string fail;

  // seed totality on a short run
  {
    RunConfig a = desk_config("linear-track", 300, 100, 17, "det_a");
    a.eval_episodes = 2;
    a.td3.warmup_steps = 100;
    a.td3.batch_size = 32;
    a.deterministic_timing = true;
    RunConfig b = a;
    b.out_dir = out_root() + "/det_b";
    if (slurp(train(a).metrics_path) != slurp(train(b).metrics_path)) {
      fail += "seed totality; ";
    }
  }

  // snapshot round trip on every env
  for (const auto& name : env_names()) {
    auto env = make_env(name, ResetMode::Train);
    RngStream rng(18);
    env->reset(rng);
    for (int i = 0; i < 5; ++i) env->step(Vector(env->spec().action_dim, 0.3));
    const EnvSnapshot snap = env->snapshot();
    const StepResult first = env->step(Vector(env->spec().action_dim, -0.2));
    env->restore(snap);
    const StepResult second = env->step(Vector(env->spec().action_dim, -0.2));
    if (first.obs != second.obs || first.reward != second.reward) {
      fail += "snapshot round trip (" + name + "); ";
    }
  }

  // evaluation purity
  {
    auto env = make_env("double-integrator", ResetMode::Train);
    RngStream rng(19);
    env->reset(rng);
    env->step({0.4});
    RngStream agent_rng(20);
    Td3Config tcfg;
    tcfg.hidden_sizes = {8, 8};
    tcfg.exploration_sigma = 0.1;
    const Td3Agent agent = make_agent(env->spec(), tcfg, agent_rng);
    const EnvSnapshot before = env->snapshot();
    const auto weights_before = agent.actor.weights;
    evaluate(agent, *env, 3, 21);
    if (env->snapshot().state != before.state || agent.actor.weights != weights_before) {
      fail += "evaluation purity; ";
    }
  }

  // live-state isolation under planning
  {
    auto env = make_env("pendulum-swingup", ResetMode::Train);
    RngStream rng(22);
    env->reset(rng);
    RngStream agent_rng(23);
    Td3Config tcfg;
    tcfg.hidden_sizes = {8, 8};
    tcfg.exploration_sigma = 0.1;
    Td3Agent agent = make_agent(env->spec(), tcfg, agent_rng);
    McbsConfig mcfg;
    mcfg.beam_noise_sigma = 0.4;
    mcfg.adaptive = false;
    Planner planner(mcfg, *env);
    BudgetLedger ledger;
    RngStream r1(24), r2(25), r3(26);
    const EnvSnapshot before = env->snapshot();
    planner.plan(agent, *env, 1, {}, tcfg, ledger, r1, r2, r3);
    if (env->snapshot().state != before.state) fail += "live-state isolation; ";
  }

  // FIFO eviction and uniform sampling
  {
    ReplayBuffer buf(3, 1, 1);
    for (double v : {1.0, 2.0, 3.0, 4.0}) buf.push({{v}, {v}, v, {v}, false});
    if (buf.at(0).reward != 2.0 || buf.at(2).reward != 4.0) fail += "FIFO eviction; ";

    ReplayBuffer ubuf(4, 1, 1);
    for (double v : {0.0, 1.0, 2.0, 3.0}) ubuf.push({{v}, {v}, v, {v}, false});
    RngStream rng(27);
    std::vector<long> counts(4, 0);
    std::vector<Transition> batch;
    for (int i = 0; i < 1000; ++i) {
      ubuf.sample(100, rng, batch);
      for (const auto& t : batch) counts[static_cast<std::size_t>(t.reward)] += 1;
    }
    for (long c : counts) {
      const double freq = static_cast<double>(c) / 100000.0;
      if (freq < 0.23 || freq > 0.27) fail += "sampling uniformity; ";
    }
  }

  // polyak identity / frozen cases
  {
    RngStream rng(28);
    Mlp online = make_mlp({2, 4, 1}, Activation::Relu, Activation::Identity);
    init_uniform_fan_in(online, rng);
    Mlp target = make_mlp({2, 4, 1}, Activation::Relu, Activation::Identity);
    Mlp copy = target;
    polyak_update(copy, online, 1.0);
    if (copy.weights != online.weights) fail += "polyak tau=1; ";
    Mlp frozen = target;
    polyak_update(frozen, online, 0.0);
    if (frozen.weights != target.weights) fail += "polyak tau=0; ";
  }

  // delayed-update schedule counts
  {
    const auto env = make_env("linear-track", ResetMode::Train);
    RngStream agent_rng(29);
    Td3Config tcfg;
    tcfg.hidden_sizes = {8, 8};
    tcfg.exploration_sigma = 0.1;
    tcfg.batch_size = 4;
    tcfg.policy_delay = 2;
    Td3Agent agent = make_agent(env->spec(), tcfg, agent_rng);
    ReplayBuffer buffer(64, 1, 1);
    RngStream data_rng(30);
    for (int i = 0; i < 16; ++i) {
      buffer.push({{data_rng.uniform(-1, 1)},
                   {data_rng.uniform(-1, 1)},
                   data_rng.uniform(-1, 1),
                   {data_rng.uniform(-1, 1)},
                   false});
    }
    RngStream sr(31), nr(32);
    int actor_updates = 0;
    const int total = 11;
    for (int i = 1; i <= total; ++i) {
      if (td3_learn_step(agent, buffer, tcfg, sr, nr).actor_updated) ++actor_updates;
    }
    if (actor_updates != total / tcfg.policy_delay) fail += "delayed-update schedule; ";
  }

  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) fail += "runtime bound (" + fmt(elapsed) + "s >= 60s); ";
  return {fail.empty(), fail.empty() ? "all invariants hold, " + fmt(elapsed) + "s" : fail};
}

std::pair<bool, std::string> criterion9_actor_ascent() {
  EnvSpec spec{"linear-track", 1, 1, 1.0, 200, 25.0};
  RngStream agent_rng(33);
  Td3Config cfg;
  cfg.hidden_sizes = {8, 8};
  cfg.exploration_sigma = 0.0;
  cfg.batch_size = 1;
  Td3Agent agent = make_agent(spec, cfg, agent_rng);

  const std::vector<Transition> batch = {{{0.5}, {0.0}, 0.0, {0.0}, false}};
  const CriticGradFn frozen = [](const Vector&, const Vector& action, Vector& dq_da) {
    const double a = action[0];
    dq_da.assign(1, -2.0 * (a - 0.3));
    return -(a - 0.3) * (a - 0.3);
  };
  int used = -1;
  for (int i = 1; i <= 5000; ++i) {
    actor_update_with_critic(agent, batch, cfg, frozen);
    if (std::abs(agent.policy_action({0.5})[0] - 0.3) < 1e-2) {
      used = i;
      break;
    }
  }
  const double gap = std::abs(agent.policy_action({0.5})[0] - 0.3);
  return {used > 0, used > 0 ? "|pi(s) - 0.3| < 1e-2 after " + std::to_string(used) + " updates"
                             : "gap still " + fmt(gap) + " after 5000 updates"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  const auto want = [&](int id) { return selected.empty() || selected.count(id) > 0; };

  std::printf("acceptance battery (outputs under %s)\n", out_root().c_str());
  const auto t0 = std::chrono::steady_clock::now();

  if (want(1)) run_criterion(1, "gradient oracle vs central differences", criterion1_gradient_oracle);
  if (want(2)) run_criterion(2, "short-horizon rollout oracle", criterion2_short_horizon_oracle);
  if (want(3)) run_criterion(3, "degenerate-beam run equals plain TD3", criterion3_td3_reduction);
  if (want(4)) run_criterion(4, "rollout budget law on stub envs", criterion4_budget_law);
  if (want(5)) run_criterion(5, "convergence-speed advantage on the pendulum", criterion5_convergence_speed);
  if (want(6)) run_criterion(6, "final-performance ordering", criterion6_final_performance);
  if (want(7)) run_criterion(7, "ablation monotonicity in beam width", criterion7_ablation_monotonicity);
  if (want(8)) run_criterion(8, "determinism and purity suite", criterion8_determinism_purity);
  if (want(9)) run_criterion(9, "actor ascent to a frozen critic's argmax", criterion9_actor_ascent);

  std::printf("%s (%d failed, %.0fs total)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
