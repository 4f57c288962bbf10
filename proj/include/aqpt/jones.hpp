#pragma once

#include "aqpt/linalg.hpp"

namespace aqpt {

inline constexpr double kHalfWaveRetardance = 3.14159265358979323846;
inline constexpr double kQuarterWaveRetardance = 1.57079632679489661923;

/// In-plane rotation by theta (degrees, counterclockwise).
CMatrix jones_rotation(double theta_deg);

/// Retarder with fast axis at theta from horizontal and retardance delta:
/// W = R(theta) diag(e^{-i delta/2}, e^{+i delta/2}) R(-theta).
CMatrix jones_waveplate(double theta_deg, double delta_rad);

}  // namespace aqpt
