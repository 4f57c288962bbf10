#pragma once

#include "aqpt/bayes.hpp"

namespace aqpt {

enum class Strategy { adaptive, random };

struct PlannerConfig {
  Strategy strategy = Strategy::adaptive;
  // Candidate pool per planning step. 100 under-resolves the argmax for
  // rank-1 processes once the posterior is narrow; 300 restores the
  // close-to-1/N convergence of unitary channels.
  int pool_size = 300;
  // Block schedule b(N) = max(b_min, ceil(eta * N)). Small early blocks
  // matter: a full-rank process is identifiable only once enough distinct
  // configurations have been visited.
  long b_min = 5;
  double eta = 0.05;
};

/// Expected Shannon entropy decrease (bits) of the next outcome at cfg.
/// Trace-preserving ensembles only.
double info_gain(const ParticleEnsemble& ens, const MeasurementConfig& cfg);

/// Same criterion with the pseudo-outcome distribution {P(0), 1 - P(0)}, which
/// stays a two-point distribution in the presence of loss. Reduces to
/// info_gain on trace-preserving ensembles.
double info_gain_lossy(const ParticleEnsemble& ens, const MeasurementConfig& cfg);

/// Random strategy: four angles i.i.d. uniform on [0, 180). Adaptive: argmax
/// of the applicable gain over pool_size fresh uniform candidates, ties broken
/// by lowest index.
MeasurementConfig next_config(const ParticleEnsemble& ens, const PlannerConfig& planner, Rng& rng);

long block_size(long events_so_far, const PlannerConfig& planner);

}  // namespace aqpt
