#include "aqpt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aqpt {

namespace {

double entropy2_bits(double p) {
  double h = 0.0;
  if (p > 0 && p < 1) {
    h = -(p * std::log2(p) + (1 - p) * std::log2(1 - p));
  }
  return h;
}

double binary_gain(const ParticleEnsemble& ens, const MeasurementConfig& cfg) {
  const DensityMatrix rho = prepared_state(cfg);
  const auto [m0, m1] = measurement_povm(cfg);
  const CMatrix eff0 = effective_op(m0, rho);
  double mean_p = 0.0;
  double mean_h = 0.0;
  for (const auto& part : ens.particles) {
    const double w = std::exp(part.log_weight);
    const double p = std::clamp(trace_prob(eff0, part.chi), 0.0, 1.0);
    mean_p += w * p;
    mean_h += w * entropy2_bits(p);
  }
  return std::max(entropy2_bits(std::clamp(mean_p, 0.0, 1.0)) - mean_h, 0.0);
}

MeasurementConfig random_config(Rng& rng) {
  return {uniform_real(rng, 0.0, 180.0), uniform_real(rng, 0.0, 180.0),
          uniform_real(rng, 0.0, 180.0), uniform_real(rng, 0.0, 180.0)};
}

}  // namespace

double info_gain(const ParticleEnsemble& ens, const MeasurementConfig& cfg) {
  if (ens.mode != Mode::tp) {
    throw std::invalid_argument("info_gain: ensemble is not trace-preserving");
  }
  return binary_gain(ens, cfg);
}

double info_gain_lossy(const ParticleEnsemble& ens, const MeasurementConfig& cfg) {
  return binary_gain(ens, cfg);
}

MeasurementConfig next_config(const ParticleEnsemble& ens, const PlannerConfig& planner,
                              Rng& rng) {
  if (planner.strategy == Strategy::random) return random_config(rng);
  if (planner.pool_size < 1) throw std::invalid_argument("next_config: pool_size must be >= 1");
  MeasurementConfig best{};
  double best_gain = -1.0;
  for (int k = 0; k < planner.pool_size; ++k) {
    const MeasurementConfig cand = random_config(rng);
    const double g =
        ens.mode == Mode::tp ? info_gain(ens, cand) : info_gain_lossy(ens, cand);
    if (g > best_gain) {
      best_gain = g;
      best = cand;
    }
  }
  return best;
}

long block_size(long events_so_far, const PlannerConfig& planner) {
  if (planner.b_min < 1) throw std::invalid_argument("block_size: b_min must be >= 1");
  if (planner.eta <= 0 || planner.eta > 1) {
    throw std::invalid_argument("block_size: eta must be in (0, 1]");
  }
  const long scaled = static_cast<long>(std::ceil(planner.eta * static_cast<double>(events_so_far)));
  return std::max(planner.b_min, scaled);
}

}  // namespace aqpt
