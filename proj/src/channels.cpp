#include "aqpt/channels.hpp"

#include "aqpt/jones.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace aqpt {

namespace {

constexpr double kPi = 3.14159265358979323846;

ChiMatrix single_kraus_chi(const CMatrix& e) {
  KrausSet ks{2, {e}, false};
  return kraus_to_chi(ks);
}

ChiMatrix waveplate_chi(double theta_deg, double delta_rad) {
  return single_kraus_chi(jones_waveplate(theta_deg, delta_rad));
}

double wrap_angle_deg(double a, double period) {
  double r = std::fmod(a, period);
  if (r < 0) r += period;
  return r;
}

// Nelder-Mead on a 2-d objective.
std::pair<std::array<double, 2>, double> nelder_mead(
    const std::function<double(const std::array<double, 2>&)>& f,
    std::array<double, 2> start, double step, int max_iter) {
  std::array<std::array<double, 2>, 3> simplex{
      start,
      std::array<double, 2>{start[0] + step, start[1]},
      std::array<double, 2>{start[0], start[1] + step}};
  std::array<double, 3> val{f(simplex[0]), f(simplex[1]), f(simplex[2])};

  auto order = [&]() {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return val[a] < val[b]; });
    std::array<std::array<double, 2>, 3> s2;
    std::array<double, 3> v2;
    for (int i = 0; i < 3; ++i) {
      s2[i] = simplex[idx[i]];
      v2[i] = val[idx[i]];
    }
    simplex = s2;
    val = v2;
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    if (std::abs(val[2] - val[0]) < 1e-14) break;
    const std::array<double, 2> centroid{(simplex[0][0] + simplex[1][0]) / 2,
                                         (simplex[0][1] + simplex[1][1]) / 2};
    auto point = [&](double coef) {
      return std::array<double, 2>{centroid[0] + coef * (simplex[2][0] - centroid[0]),
                                   centroid[1] + coef * (simplex[2][1] - centroid[1])};
    };
    const auto refl = point(-1.0);
    const double fr = f(refl);
    if (fr < val[0]) {
      const auto exp_p = point(-2.0);
      const double fe = f(exp_p);
      if (fe < fr) {
        simplex[2] = exp_p;
        val[2] = fe;
      } else {
        simplex[2] = refl;
        val[2] = fr;
      }
    } else if (fr < val[1]) {
      simplex[2] = refl;
      val[2] = fr;
    } else {
      const auto con = point(0.5);
      const double fc = f(con);
      if (fc < val[2]) {
        simplex[2] = con;
        val[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          simplex[i] = {(simplex[i][0] + simplex[0][0]) / 2, (simplex[i][1] + simplex[0][1]) / 2};
          val[i] = f(simplex[i]);
        }
      }
    }
  }
  order();
  return {simplex[0], val[0]};
}

std::vector<double> parse_params(const std::string& text, size_t colon) {
  std::vector<double> out;
  std::stringstream ss(text.substr(colon + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("channel spec: bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

ChiMatrix make_channel(const ChannelSpec& spec) {
  return std::visit(
      [](const auto& s) -> ChiMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return single_kraus_chi(CMatrix::Identity(2, 2));
        } else if constexpr (std::is_same_v<T, Waveplate>) {
          return waveplate_chi(s.theta_deg, s.delta_rad);
        } else if constexpr (std::is_same_v<T, Depolarizing>) {
          if (s.q < 0 || s.q > 1) throw std::invalid_argument("depolarizing: q out of [0, 1]");
          ChiMatrix id = single_kraus_chi(CMatrix::Identity(2, 2));
          ChiMatrix out = id;
          out.mat = (1.0 - s.q) * id.mat + s.q * 0.5 * CMatrix::Identity(4, 4);
          out.trace_preserving = true;
          return out;
        } else if constexpr (std::is_same_v<T, PartialDepolarizer>) {
          if (s.n_phases < 1) throw std::invalid_argument("partial depolarizer: n_phases < 1");
          CMatrix acc = CMatrix::Zero(4, 4);
          for (int j = 0; j < s.n_phases; ++j) {
            const double delta = s.delta0_rad + s.ddelta_rad * std::sin(2.0 * kPi * j / s.n_phases);
            acc += waveplate_chi(0.0, delta).mat;
          }
          return ChiMatrix{2, acc / s.n_phases, true};
        } else if constexpr (std::is_same_v<T, Polarizer>) {
          if (s.transmittance < 0 || s.transmittance > 1) {
            throw std::invalid_argument("polarizer: transmittance out of [0, 1]");
          }
          const CMatrix r = jones_rotation(s.axis_deg);
          CMatrix proj = CMatrix::Zero(2, 2);
          proj(0, 0) = 1;
          return single_kraus_chi(std::sqrt(s.transmittance) * r * proj * r.adjoint());
        } else {
          static_assert(std::is_same_v<T, NeutralFilter>);
          if (s.transmission < 0 || s.transmission > 1) {
            throw std::invalid_argument("neutral filter: transmission out of [0, 1]");
          }
          return single_kraus_chi(std::sqrt(s.transmission) * CMatrix::Identity(2, 2));
        }
      },
      spec);
}

ChannelSpec parse_channel_spec(const std::string& text) {
  const size_t colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "identity") {
    if (colon != std::string::npos) throw std::invalid_argument("identity takes no parameters");
    return Identity{};
  }
  if (colon == std::string::npos) {
    throw std::invalid_argument("channel spec '" + text + "' is missing parameters");
  }
  const auto p = parse_params(text, colon);
  if (kind == "waveplate") {
    if (p.size() != 2) throw std::invalid_argument("waveplate:THETA_DEG,DELTA_RAD");
    return Waveplate{p[0], p[1]};
  }
  if (kind == "depol") {
    if (p.size() != 1) throw std::invalid_argument("depol:Q");
    return Depolarizing{p[0]};
  }
  if (kind == "lcwp") {
    if (p.size() != 2) throw std::invalid_argument("lcwp:DELTA0,DDELTA");
    return PartialDepolarizer{p[0], p[1], 64};
  }
  if (kind == "polarizer") {
    if (p.size() != 2) throw std::invalid_argument("polarizer:AXIS_DEG,T");
    return Polarizer{p[0], p[1]};
  }
  if (kind == "filter") {
    if (p.size() != 1) throw std::invalid_argument("filter:TRANSMISSION");
    return NeutralFilter{p[0]};
  }
  throw std::invalid_argument("unknown channel kind '" + kind + "'");
}

std::string channel_spec_to_string(const ChannelSpec& spec) {
  std::ostringstream ss;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Identity>) {
          ss << "identity";
        } else if constexpr (std::is_same_v<T, Waveplate>) {
          ss << "waveplate:" << s.theta_deg << "," << s.delta_rad;
        } else if constexpr (std::is_same_v<T, Depolarizing>) {
          ss << "depol:" << s.q;
        } else if constexpr (std::is_same_v<T, PartialDepolarizer>) {
          ss << "lcwp:" << s.delta0_rad << "," << s.ddelta_rad;
        } else if constexpr (std::is_same_v<T, Polarizer>) {
          ss << "polarizer:" << s.axis_deg << "," << s.transmittance;
        } else {
          ss << "filter:" << s.transmission;
        }
      },
      spec);
  return ss.str();
}

WaveplateFit fit_waveplate(const ChiMatrix& chi) {
  validate(chi);
  auto objective = [&](const std::array<double, 2>& x) {
    return bures_distance_sq(chi.mat, waveplate_chi(x[0], x[1]).mat);
  };

  Rng rng = make_rng(0x5eedf17ULL);
  WaveplateFit best{0, 0, std::numeric_limits<double>::infinity()};
  const int restarts = 8;
  for (int r = 0; r < restarts; ++r) {
    const std::array<double, 2> start{uniform_real(rng, 0.0, 180.0),
                                      uniform_real(rng, 0.0, 2.0 * kPi)};
    auto [x, fx] = nelder_mead(objective, start, 10.0, 400);
    if (fx < best.residual) best = WaveplateFit{x[0], x[1], fx};
  }

  // Canonical representative: theta in [0, 180), delta in [0, pi].
  best.theta_deg = wrap_angle_deg(best.theta_deg, 180.0);
  best.delta_rad = std::fmod(best.delta_rad, 2.0 * kPi);
  if (best.delta_rad < 0) best.delta_rad += 2.0 * kPi;
  if (best.delta_rad > kPi) {
    best.delta_rad = 2.0 * kPi - best.delta_rad;
    best.theta_deg = wrap_angle_deg(best.theta_deg + 90.0, 180.0);
  }

  if (best.residual > 0.5) {
    throw std::runtime_error("fit_waveplate: input is not close to a single retarder");
  }
  return best;
}

}  // namespace aqpt
