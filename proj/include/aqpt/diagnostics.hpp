#pragma once

#include "aqpt/apparatus.hpp"

#include <optional>
#include <vector>

namespace aqpt {

/// One convergence checkpoint of a tomography run.
struct TracePoint {
  long n = 0;                      // cumulative detected events
  std::optional<double> d2_truth;  // squared Bures distance to the true process
  double dist_size = 0.0;          // posterior distribution size
  double chi2_norm = 0.0;          // chi²/b of the latest block
  std::optional<double> r_dd;      // d2_truth / dist_size
  double ess = 0.0;
};

enum class TraceField { d2_truth, dist_size, chi2_norm };

struct PowerLawFit {
  double c = 0.0;
  double alpha = 0.0;
  double stderr_c = 0.0;
  double stderr_alpha = 0.0;
  long n_points = 0;
  double n_min = 0.0;
  double n_max = 0.0;
};

/// Pearson statistic sum_g (n_g - b p_g)² / (b p_g) of one block against the
/// outcome probabilities the estimate predicts. Probabilities are floored at
/// 1e-9; lossy blocks use the renormalized two-outcome distribution.
double chi_squared(const CountRecord& rec, const ChiMatrix& estimate);

std::vector<double> moving_average(const std::vector<double>& y, int window);

/// First N at which the local log-log slope of y(N), estimated by least
/// squares over `window` consecutive checkpoints, rises above slope_thresh.
std::optional<double> plateau_detect(const std::vector<double>& n, const std::vector<double>& y,
                                     int window, double slope_thresh);

/// Field-selecting overload; chi2_norm curves are smoothed by a 5-point moving
/// average before slope estimation.
std::optional<double> plateau_detect(const std::vector<TracePoint>& trace, TraceField field,
                                     int window = 5, double slope_thresh = -0.25);

/// Least squares of log y on log N restricted to n in [n_min, n_max].
PowerLawFit power_law_fit(const std::vector<double>& n, const std::vector<double>& y,
                          double n_min, double n_max);

std::optional<double> r_dd(std::optional<double> d2_truth, double dist_size);

double trace_field(const TracePoint& pt, TraceField field);

}  // namespace aqpt
