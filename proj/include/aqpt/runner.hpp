#pragma once

#include "aqpt/channels.hpp"
#include "aqpt/diagnostics.hpp"
#include "aqpt/planner.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aqpt {

struct RunConfig {
  ChannelSpec channel = Identity{};
  Mode mode = Mode::tp;
  PlannerConfig planner;
  int particles = 0;  // 0 selects the mode default: 10³ (tp) or 10⁴ (lossy)
  double noise_deg = 0.0;
  long max_events = 100000;
  std::uint64_t seed = 0;
  int checkpoints_per_decade = 20;
  Calibration source;  // lossy-mode light source rates
  double t_cal = 100.0;
  ResampleOptions resample_opts;
};

int effective_particles(const RunConfig& cfg);
void validate(const RunConfig& cfg);

struct RunResult {
  std::vector<TracePoint> trace;
  ChiMatrix estimate;
  ChiMatrix truth;
};

/// Closed tomography loop: plan a configuration, simulate a block, update the
/// posterior, resample below 0.1 S effective samples, checkpoint on a fixed
/// logarithmic grid until max_events is reached.
RunResult run_tomography(const RunConfig& cfg, ParticleEnsemble* final_ensemble = nullptr);

/// Repeats with per-index derived seeds, run in parallel up to `jobs` threads.
std::vector<RunResult> run_repeats(const RunConfig& base, int repeats, int jobs);
std::vector<RunResult> run_repeats(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                                   int jobs);

/// Checkpoint-aligned aggregate over repeats.
struct MeanTrace {
  std::vector<long> n;
  std::vector<double> d2_truth, d2_truth_se;
  std::vector<double> dist_size, dist_size_se;
  std::vector<double> chi2_norm, chi2_norm_se;
  std::vector<double> r_dd;  // ratio of the averaged numerator and denominator
  std::vector<double> ess;
};

MeanTrace average_traces(const std::vector<RunResult>& results);

struct SweepAxes {
  std::vector<ChannelSpec> channels;
  std::vector<Strategy> strategies;
  std::vector<double> noise_deg;
};

struct SweepConfig {
  RunConfig base;
  SweepAxes axes;
  int repeats = 1;
  std::vector<std::uint64_t> seeds;  // optional explicit per-repeat seeds
};

void validate(const SweepConfig& cfg);

struct SweepCell {
  std::string name;
  RunConfig config;
  MeanTrace mean;
  std::optional<PowerLawFit> d2_fit;
  std::optional<PowerLawFit> dist_fit;
  std::optional<double> plateau_chi2;
  std::optional<double> plateau_d2;
};

struct SweepReport {
  std::vector<SweepCell> cells;
};

/// Runs every cell of the axes product, `repeats` runs per cell; fits the
/// averaged curves over [10³, max_events] and applies the plateau detector.
SweepReport run_sweep(const SweepConfig& cfg, int jobs);

}  // namespace aqpt
