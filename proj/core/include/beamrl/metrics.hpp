#pragma once

#include <span>
#include <string>
#include <vector>

namespace beamrl {

inline constexpr const char* kMetricsHeader =
    "real_step,episodes_done,train_return_last,eval_return_mean,eval_return_std,"
    "rollout_env_steps_cum,beam_on_fraction,wall_seconds";

inline constexpr long kNotReached = -1;

struct MetricsRow {
  long real_step = 0;
  long episodes_done = 0;
  double train_return_last = 0.0;
  double eval_return_mean = 0.0;
  double eval_return_std = 0.0;
  long rollout_env_steps_cum = 0;
  double beam_on_fraction = 0.0;
  double wall_seconds = 0.0;
};

std::string format_metrics_row(const MetricsRow& row);

// First real_step whose eval mean reaches `fraction` of the run's improvement
// over the first row (the measured baseline). kNotReached when the run never
// improves on the baseline.
long steps_to_fraction(std::span<const MetricsRow> rows, double fraction);

}  // namespace beamrl
