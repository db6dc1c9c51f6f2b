#include "beamrl/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace beamrl {

std::string format_metrics_row(const MetricsRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%ld,%ld,%.17g,%.17g,%.17g,%ld,%.17g,%.3f", row.real_step,
                row.episodes_done, row.train_return_last, row.eval_return_mean,
                row.eval_return_std, row.rollout_env_steps_cum, row.beam_on_fraction,
                row.wall_seconds);
  return buf;
}

long steps_to_fraction(std::span<const MetricsRow> rows, double fraction) {
  if (rows.empty()) throw std::invalid_argument("steps_to_fraction: no metrics rows");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("steps_to_fraction: fraction must be in (0,1]");
  }
  const double baseline = rows.front().eval_return_mean;
  double peak = baseline;
  for (const MetricsRow& r : rows) peak = std::max(peak, r.eval_return_mean);
  const double improvement = peak - baseline;
  if (improvement <= 0.0) return kNotReached;
  const double target = baseline + fraction * improvement;
  for (const MetricsRow& r : rows) {
    if (r.eval_return_mean >= target) return r.real_step;
  }
  return kNotReached;
}

}  // namespace beamrl
