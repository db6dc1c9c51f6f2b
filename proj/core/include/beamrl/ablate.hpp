#pragma once

#include <string>
#include <vector>

#include "beamrl/config.hpp"

namespace beamrl {

inline constexpr const char* kAblationHeader =
    "beam_width,rollout_depth,final_eval_mean,final_eval_std,steps_to_90pct,"
    "rollout_steps_total,wall_seconds";

struct AblationRow {
  int beam_width = 1;
  int rollout_depth = 0;
  double final_eval_mean = 0.0;
  double final_eval_std = 0.0;
  long steps_to_90pct = 0;  // -1 when the run never improved on its baseline
  long rollout_steps_total = 0;
  double wall_seconds = 0.0;
  bool failed = false;
};

std::string format_ablation_row(const AblationRow& row);

// One seeded run per (beam_width, rollout_depth) cell plus a plain TD3
// baseline row. Cells with beam_width 1 run as plain TD3 (a beam of one is
// the policy itself). Per-cell failures are recorded as NaN rows; the grid
// is still emitted to <out_dir>/ablation.csv.
std::vector<AblationRow> ablate(const RunConfig& base, const std::vector<int>& beams,
                                const std::vector<int>& depths);

}  // namespace beamrl
