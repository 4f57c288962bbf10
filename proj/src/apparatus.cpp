#include "aqpt/apparatus.hpp"

#include "aqpt/jones.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aqpt {

namespace {

double wrap180(double a) {
  double r = std::fmod(a, 180.0);
  if (r < 0) r += 180.0;
  return r;
}

long poisson_draw(double mean, Rng& rng) {
  if (mean <= 0) return 0;
  return std::poisson_distribution<long>(mean)(rng);
}

}  // namespace

MeasurementConfig canonicalized(const MeasurementConfig& cfg) {
  return {wrap180(cfg.prep_hwp), wrap180(cfg.prep_qwp), wrap180(cfg.meas_qwp),
          wrap180(cfg.meas_hwp)};
}

DensityMatrix prepared_state(const MeasurementConfig& cfg) {
  CVector h(2);
  h << 1, 0;
  const CVector psi = jones_waveplate(cfg.prep_qwp, kQuarterWaveRetardance) *
                      (jones_waveplate(cfg.prep_hwp, kHalfWaveRetardance) * h);
  return DensityMatrix{2, psi * psi.adjoint()};
}

std::pair<CMatrix, CMatrix> measurement_povm(const MeasurementConfig& cfg) {
  const CMatrix w = jones_waveplate(cfg.meas_hwp, kHalfWaveRetardance) *
                    jones_waveplate(cfg.meas_qwp, kQuarterWaveRetardance);
  CMatrix ph = CMatrix::Zero(2, 2);
  ph(0, 0) = 1;
  CMatrix pv = CMatrix::Zero(2, 2);
  pv(1, 1) = 1;
  return {w.adjoint() * ph * w, w.adjoint() * pv * w};
}

CMatrix effective_op(const CMatrix& m, const DensityMatrix& rho) {
  const int d = rho.dim;
  if (m.rows() != d || m.cols() != d) {
    throw std::invalid_argument("effective_op: dimension mismatch");
  }
  CMatrix out(d * d, d * d);
  for (int j = 0; j < d; ++j) {
    for (int l = 0; l < d; ++l) {
      out.block(j * d, l * d, d, d) = m(j, l) * rho.mat.conjugate();
    }
  }
  return out;
}

double outcome_prob(const ChiMatrix& chi, const MeasurementConfig& cfg, int gamma) {
  if (gamma != 0 && gamma != 1) throw std::invalid_argument("outcome_prob: gamma must be 0 or 1");
  const DensityMatrix rho = prepared_state(cfg);
  const auto [m0, m1] = measurement_povm(cfg);
  const CMatrix a = effective_op(gamma == 0 ? m0 : m1, rho);
  const double p = (a * chi.mat).trace().real();
  return std::clamp(p, 0.0, 1.0);
}

MeasurementConfig jitter(const MeasurementConfig& cfg, const NoiseModel& noise, Rng& rng) {
  if (noise.phi0_deg < 0 || noise.phi0_deg > 45) {
    throw std::invalid_argument("NoiseModel: phi0 must be in [0, 45] degrees");
  }
  if (noise.phi0_deg == 0) return cfg;
  auto shift = [&]() { return uniform_real(rng, -noise.phi0_deg, noise.phi0_deg); };
  return {cfg.prep_hwp + shift(), cfg.prep_qwp + shift(), cfg.meas_qwp + shift(),
          cfg.meas_hwp + shift()};
}

CountRecord simulate_block_tp(const ChiMatrix& truth, const MeasurementConfig& cfg, long b,
                              const NoiseModel& noise, Rng& rng) {
  if (b < 0) throw std::invalid_argument("simulate_block_tp: negative block size");
  const MeasurementConfig actual = jitter(cfg, noise, rng);
  const double p0 = outcome_prob(truth, actual, 0);
  const long n0 = b > 0 ? std::binomial_distribution<long>(b, p0)(rng) : 0;
  return CountRecord{cfg, n0, b - n0, b, 0.0, Mode::tp};
}

CountRecord simulate_block_lossy(const ChiMatrix& truth, const MeasurementConfig& cfg, double t,
                                 const Calibration& cal, const NoiseModel& noise, Rng& rng) {
  if (t < 0) throw std::invalid_argument("simulate_block_lossy: negative duration");
  const MeasurementConfig actual = jitter(cfg, noise, rng);
  const double p0 = outcome_prob(truth, actual, 0);
  const double p1 = outcome_prob(truth, actual, 1);
  const long n0 = poisson_draw(cal.intensity0 * p0 * t, rng);
  const long n1 = poisson_draw(cal.intensity1 * p1 * t, rng);
  return CountRecord{cfg, n0, n1, 0, t, Mode::lossy};
}

Calibration calibrate(const Calibration& truth, double t_cal, Rng& rng) {
  if (t_cal <= 0) throw std::invalid_argument("calibrate: t_cal must be positive");
  const long c0 = poisson_draw(truth.intensity0 * t_cal, rng);
  const long c1 = poisson_draw(truth.intensity1 * t_cal, rng);
  return Calibration{c0 / t_cal, c1 / t_cal};
}

}  // namespace aqpt
