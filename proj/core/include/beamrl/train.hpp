#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "beamrl/config.hpp"
#include "beamrl/env.hpp"
#include "beamrl/mcbs.hpp"
#include "beamrl/metrics.hpp"
#include "beamrl/td3.hpp"

namespace beamrl {

struct EvalResult {
  double mean = 0.0;
  double stddev = 0.0;  // population std; zero for a single episode
};

// Deterministic-policy evaluation on a clone of `prototype` (no beam, no
// exploration noise). Never mutates the agent, the prototype, or any buffer.
EvalResult evaluate(const Td3Agent& agent, const Env& prototype, int episodes,
                    std::uint64_t seed);

// Planner-in-the-loop variant used by the eval_with_beam flag. Planning cost
// is charged to a throwaway ledger.
EvalResult evaluate_with_planner(const Td3Agent& agent, const Env& prototype, int episodes,
                                 std::uint64_t seed, const McbsConfig& mcbs_cfg,
                                 const Td3Config& td3_cfg);

struct TrainResult {
  std::vector<MetricsRow> rows;
  BudgetLedger ledger;
  std::string metrics_path;
  std::string checkpoint_path;
  std::string manifest_path;
};

using RowCallback = std::function<void(const MetricsRow&)>;

// Warmup with uniform random actions, then the plan/explore -> step -> store
// -> update loop, evaluating every eval_interval real steps. Writes the
// metrics CSV incrementally plus a final checkpoint and config manifest
// under cfg.out_dir. on_row, when set, observes each metrics row as it is
// written.
TrainResult train(const RunConfig& cfg, const RowCallback& on_row = {});

}  // namespace beamrl
