#include "aqpt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aqpt {

namespace {
constexpr double kProbFloor = 1e-9;
}

double chi_squared(const CountRecord& rec, const ChiMatrix& estimate) {
  const double b = rec.mode == Mode::tp ? static_cast<double>(rec.block)
                                        : static_cast<double>(rec.n0 + rec.n1);
  if (b <= 0) return 0.0;
  double p0 = outcome_prob(estimate, rec.config, 0);
  double p1;
  if (rec.mode == Mode::tp) {
    p1 = 1.0 - p0;
  } else {
    p1 = outcome_prob(estimate, rec.config, 1);
    const double tot = p0 + p1;
    if (tot > 0) {
      p0 /= tot;
      p1 = 1.0 - p0;
    }
  }
  p0 = std::clamp(p0, kProbFloor, 1.0 - kProbFloor);
  p1 = std::clamp(p1, kProbFloor, 1.0 - kProbFloor);
  const double d0 = rec.n0 - b * p0;
  const double d1 = rec.n1 - b * p1;
  return d0 * d0 / (b * p0) + d1 * d1 / (b * p1);
}

std::vector<double> moving_average(const std::vector<double>& y, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    const size_t lo = i + 1 >= static_cast<size_t>(window) ? i + 1 - window : 0;
    double s = 0.0;
    for (size_t j = lo; j <= i; ++j) s += y[j];
    out[i] = s / static_cast<double>(i - lo + 1);
  }
  return out;
}

std::optional<double> plateau_detect(const std::vector<double>& n, const std::vector<double>& y,
                                     int window, double slope_thresh) {
  if (n.size() != y.size()) throw std::invalid_argument("plateau_detect: size mismatch");
  if (window < 2) throw std::invalid_argument("plateau_detect: window must be >= 2");
  const size_t w = static_cast<size_t>(window);
  if (n.size() < w) return std::nullopt;
  for (size_t end = w - 1; end < n.size(); ++end) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = end + 1 - w; i <= end; ++i) {
      const double x = std::log(n[i]);
      const double v = std::log(std::max(y[i], 1e-300));
      sx += x;
      sy += v;
      sxx += x * x;
      sxy += x * v;
    }
    const double m = static_cast<double>(w);
    const double denom = m * sxx - sx * sx;
    if (denom <= 0) continue;
    const double slope = (m * sxy - sx * sy) / denom;
    if (slope > slope_thresh) return n[end];
  }
  return std::nullopt;
}

double trace_field(const TracePoint& pt, TraceField field) {
  switch (field) {
    case TraceField::d2_truth:
      return pt.d2_truth.value_or(0.0);
    case TraceField::dist_size:
      return pt.dist_size;
    case TraceField::chi2_norm:
      return pt.chi2_norm;
  }
  return 0.0;
}

std::optional<double> plateau_detect(const std::vector<TracePoint>& trace, TraceField field,
                                     int window, double slope_thresh) {
  std::vector<double> n(trace.size()), y(trace.size());
  for (size_t i = 0; i < trace.size(); ++i) {
    n[i] = static_cast<double>(trace[i].n);
    y[i] = trace_field(trace[i], field);
  }
  if (field == TraceField::chi2_norm) y = moving_average(y, 5);
  return plateau_detect(n, y, window, slope_thresh);
}

PowerLawFit power_law_fit(const std::vector<double>& n, const std::vector<double>& y,
                          double n_min, double n_max) {
  if (n.size() != y.size()) throw std::invalid_argument("power_law_fit: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long m = 0;
  for (size_t i = 0; i < n.size(); ++i) {
    if (n[i] < n_min || n[i] > n_max) continue;
    if (y[i] <= 0) throw std::invalid_argument("power_law_fit: non-positive value in range");
    const double x = std::log(n[i]);
    const double v = std::log(y[i]);
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
    ++m;
  }
  if (m < 3) throw std::invalid_argument("power_law_fit: fewer than 3 points in range");
  const double dm = static_cast<double>(m);
  const double sxx_c = sxx - sx * sx / dm;
  const double slope = (sxy - sx * sy / dm) / sxx_c;
  const double intercept = (sy - slope * sx) / dm;
  double rss = 0.0;
  for (size_t i = 0; i < n.size(); ++i) {
    if (n[i] < n_min || n[i] > n_max) continue;
    const double r = std::log(y[i]) - (intercept + slope * std::log(n[i]));
    rss += r * r;
  }
  const double s2 = m > 2 ? rss / (dm - 2.0) : 0.0;
  const double se_slope = std::sqrt(s2 / sxx_c);
  const double se_intercept = std::sqrt(s2 * (1.0 / dm + (sx / dm) * (sx / dm) / sxx_c));
  PowerLawFit fit;
  fit.alpha = slope;
  fit.c = std::exp(intercept);
  fit.stderr_alpha = se_slope;
  fit.stderr_c = fit.c * se_intercept;
  fit.n_points = m;
  fit.n_min = n_min;
  fit.n_max = n_max;
  return fit;
}

std::optional<double> r_dd(std::optional<double> d2_truth, double dist_size) {
  if (!d2_truth.has_value() || dist_size < 1e-15) return std::nullopt;
  return *d2_truth / dist_size;
}

}  // namespace aqpt
