#include "aqpt/jones.hpp"

#include <cmath>

namespace aqpt {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

CMatrix jones_rotation(double theta_deg) {
  const double t = theta_deg * kDegToRad;
  CMatrix r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

CMatrix jones_waveplate(double theta_deg, double delta_rad) {
  const Complex i(0, 1);
  CMatrix ph = CMatrix::Zero(2, 2);
  ph(0, 0) = std::exp(-i * (delta_rad / 2.0));
  ph(1, 1) = std::exp(i * (delta_rad / 2.0));
  return jones_rotation(theta_deg) * ph * jones_rotation(-theta_deg);
}

}  // namespace aqpt
