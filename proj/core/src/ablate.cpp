#include "beamrl/ablate.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "beamrl/train.hpp"

namespace beamrl {

namespace {

AblationRow run_cell(const RunConfig& cfg, int beam_width, int rollout_depth) {
  AblationRow row;
  row.beam_width = beam_width;
  row.rollout_depth = rollout_depth;
  try {
    const TrainResult res = train(cfg);
    if (res.rows.empty()) throw std::runtime_error("empty metrics");
    row.final_eval_mean = res.rows.back().eval_return_mean;
    row.final_eval_std = res.rows.back().eval_return_std;
    row.steps_to_90pct = steps_to_fraction(res.rows, 0.9);
    row.rollout_steps_total = res.ledger.rollout_env_steps;
    row.wall_seconds = res.rows.back().wall_seconds;
  } catch (const std::exception& e) {
    std::cerr << "ablate: cell (B=" << beam_width << ", D=" << rollout_depth
              << ") failed: " << e.what() << "\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.final_eval_mean = nan;
    row.final_eval_std = nan;
    row.steps_to_90pct = kNotReached;
    row.rollout_steps_total = 0;
    row.wall_seconds = nan;
    row.failed = true;
  }
  return row;
}

}  // namespace

std::string format_ablation_row(const AblationRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%ld,%ld,%.3f", row.beam_width,
                row.rollout_depth, row.final_eval_mean, row.final_eval_std, row.steps_to_90pct,
                row.rollout_steps_total, row.wall_seconds);
  return buf;
}

std::vector<AblationRow> ablate(const RunConfig& base, const std::vector<int>& beams,
                                const std::vector<int>& depths) {
  if (beams.empty() || depths.empty()) {
    throw std::invalid_argument("ablate: beam and depth lists must be non-empty");
  }

  std::vector<AblationRow> rows;
  rows.reserve(beams.size() * depths.size() + 1);
  for (int b : beams) {
    for (int d : depths) {
      RunConfig cfg = base;
      cfg.out_dir = base.out_dir + "/cell_B" + std::to_string(b) + "_D" + std::to_string(d);
      if (b == 1) {
        cfg.algorithm = Algorithm::Td3;
      } else {
        cfg.algorithm = Algorithm::McbsTd3;
        cfg.mcbs.beam_width = b;
        cfg.mcbs.rollout_depth = d;
      }
      rows.push_back(run_cell(cfg, b, d));
    }
  }

  {
    RunConfig cfg = base;
    cfg.algorithm = Algorithm::Td3;
    cfg.out_dir = base.out_dir + "/cell_td3";
    rows.push_back(run_cell(cfg, 1, 0));
  }

  std::filesystem::create_directories(base.out_dir);
  const std::string csv_path = base.out_dir + "/ablation.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write ablation grid: " + csv_path);
  csv << kAblationHeader << "\n";
  for (const AblationRow& row : rows) csv << format_ablation_row(row) << "\n";
  return rows;
}

}  // namespace beamrl
