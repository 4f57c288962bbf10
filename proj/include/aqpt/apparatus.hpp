#pragma once

#include "aqpt/process.hpp"

#include <cstdint>
#include <utility>

namespace aqpt {

enum class Mode { tp, lossy };

/// Four wave-plate angles (degrees): state preparation HWP/QWP followed by the
/// measurement QWP/HWP in front of a two-output polarizing splitter.
struct MeasurementConfig {
  double prep_hwp = 0.0;
  double prep_qwp = 0.0;
  double meas_qwp = 0.0;
  double meas_hwp = 0.0;
};

MeasurementConfig canonicalized(const MeasurementConfig& cfg);

/// Uniform angle-setting error: each plate lands within +-phi0 of the command.
struct NoiseModel {
  double phi0_deg = 0.0;
};

struct CountRecord {
  MeasurementConfig config;
  long n0 = 0;
  long n1 = 0;
  long block = 0;        // tp mode: n0 + n1 == block
  double duration = 0.0; // lossy mode
  Mode mode = Mode::tp;
};

/// Count rates (per unit time) each detector sees with no process in place.
struct Calibration {
  double intensity0 = 1e4;
  double intensity1 = 1e4;
};

DensityMatrix prepared_state(const MeasurementConfig& cfg);

/// Two-outcome projective POVM {M_0, M_1}, M_0 + M_1 = I.
std::pair<CMatrix, CMatrix> measurement_povm(const MeasurementConfig& cfg);

/// M ⊗ rho*: the process-space measurement operator, satisfying
/// Tr((M ⊗ rho*) chi) = Tr(M E(rho)).
CMatrix effective_op(const CMatrix& m, const DensityMatrix& rho);

double outcome_prob(const ChiMatrix& chi, const MeasurementConfig& cfg, int gamma);

MeasurementConfig jitter(const MeasurementConfig& cfg, const NoiseModel& noise, Rng& rng);

/// Fixed-size photon block: n0 ~ Binomial(b, P(0 | truth, jittered cfg)).
CountRecord simulate_block_tp(const ChiMatrix& truth, const MeasurementConfig& cfg, long b,
                              const NoiseModel& noise, Rng& rng);

/// Timed block with Poissonian counts: n_g ~ Poisson(I_g P(g) t).
CountRecord simulate_block_lossy(const ChiMatrix& truth, const MeasurementConfig& cfg, double t,
                                 const Calibration& cal, const NoiseModel& noise, Rng& rng);

/// Simulated intensity calibration: each detector rate estimated from a
/// Poisson count over t_cal.
Calibration calibrate(const Calibration& truth, double t_cal, Rng& rng);

}  // namespace aqpt
