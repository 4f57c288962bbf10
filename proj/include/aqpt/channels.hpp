#pragma once

#include "aqpt/process.hpp"

#include <string>
#include <variant>

namespace aqpt {

// Reference channels used as simulation ground truth.

struct Identity {};

struct Waveplate {
  double theta_deg = 0.0;
  double delta_rad = 0.0;
};

struct Depolarizing {
  double q = 0.0;  // mixing fraction in [0, 1]
};

/// Retarder whose phase is modulated around delta0; acts as a partial
/// depolarizer once the phases are averaged out.
struct PartialDepolarizer {
  double delta0_rad = 0.0;
  double ddelta_rad = 0.0;
  int n_phases = 64;
};

struct Polarizer {
  double axis_deg = 0.0;
  double transmittance = 1.0;
};

struct NeutralFilter {
  double transmission = 1.0;
};

using ChannelSpec =
    std::variant<Identity, Waveplate, Depolarizing, PartialDepolarizer, Polarizer, NeutralFilter>;

ChiMatrix make_channel(const ChannelSpec& spec);

/// Parses the CLI grammar: `identity`, `waveplate:THETA_DEG,DELTA_RAD`,
/// `depol:Q`, `lcwp:DELTA0,DDELTA`, `polarizer:AXIS_DEG,T`, `filter:TRANSMISSION`.
ChannelSpec parse_channel_spec(const std::string& text);
std::string channel_spec_to_string(const ChannelSpec& spec);

struct WaveplateFit {
  double theta_deg = 0.0;
  double delta_rad = 0.0;
  double residual = 0.0;  // achieved squared Bures distance
};

/// Recovers wave-plate parameters by derivative-free minimization of the Bures
/// distance to a single-retarder process, multi-start over theta in [0, 180)
/// and delta in [0, 2pi). Throws if the best residual exceeds 0.5.
WaveplateFit fit_waveplate(const ChiMatrix& chi);

}  // namespace aqpt
