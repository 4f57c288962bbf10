#include "aqpt/io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace aqpt;

namespace {

ChiMatrix chi_from_array(const CMatrix& mat, bool trace_preserving) {
  if (mat.rows() != mat.cols()) throw std::invalid_argument("chi must be square");
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(mat.rows()))));
  if (d * d != mat.rows()) throw std::invalid_argument("chi side must be a perfect square");
  ChiMatrix chi{d, mat, trace_preserving};
  validate(chi);
  return chi;
}

MeasurementConfig config_from_angles(const std::vector<double>& angles) {
  if (angles.size() != 4) {
    throw std::invalid_argument("config expects four angles [prep_hwp, prep_qwp, meas_qwp, meas_hwp]");
  }
  return MeasurementConfig{angles[0], angles[1], angles[2], angles[3]};
}

py::dict fit_to_dict(const PowerLawFit& fit) {
  py::dict d;
  d["C"] = fit.c;
  d["alpha"] = fit.alpha;
  d["stderr_C"] = fit.stderr_c;
  d["stderr_alpha"] = fit.stderr_alpha;
  d["n_points"] = fit.n_points;
  d["range"] = py::make_tuple(fit.n_min, fit.n_max);
  return d;
}

py::dict run_to_dict(const RunResult& result) {
  const size_t len = result.trace.size();
  std::vector<long> n(len);
  Eigen::VectorXd d2(len), ds(len), c2(len), ess(len);
  std::vector<py::object> rdd(len);
  for (size_t i = 0; i < len; ++i) {
    const TracePoint& pt = result.trace[i];
    n[i] = pt.n;
    d2[i] = pt.d2_truth.value_or(0.0);
    ds[i] = pt.dist_size;
    c2[i] = pt.chi2_norm;
    ess[i] = pt.ess;
    rdd[i] = pt.r_dd ? py::cast(*pt.r_dd) : py::none();
  }
  py::dict trace;
  trace["N"] = n;
  trace["d2_truth"] = d2;
  trace["dist_size"] = ds;
  trace["chi2_norm"] = c2;
  trace["r_dd"] = rdd;
  trace["ess"] = ess;

  py::dict out;
  out["trace"] = trace;
  out["estimate"] = result.estimate.mat;
  out["estimate_trace_preserving"] = result.estimate.trace_preserving;
  out["truth"] = result.truth.mat;
  return out;
}

RunConfig build_run_config(const std::string& channel, const std::string& mode,
                           const std::string& strategy, int particles, double noise_deg,
                           long max_events, std::uint64_t seed, int pool, long bmin, double eta,
                           int checkpoints_per_decade, double intensity0, double intensity1,
                           double t_cal, int mh_steps, double mh_scale) {
  Json j;
  j["channel"] = channel;
  j["mode"] = mode;
  j["strategy"] = strategy;
  j["particles"] = particles;
  j["noise_deg"] = noise_deg;
  j["max_events"] = max_events;
  j["seed"] = seed;
  j["pool"] = pool;
  j["bmin"] = bmin;
  j["eta"] = eta;
  j["checkpoints_per_decade"] = checkpoints_per_decade;
  j["intensity0"] = intensity0;
  j["intensity1"] = intensity1;
  j["t_cal"] = t_cal;
  j["mh_steps"] = mh_steps;
  j["mh_scale"] = mh_scale;
  return run_config_from_json(j);
}

}  // namespace

PYBIND11_MODULE(_aqpt, m) {
  m.doc() = "Adaptive Bayesian quantum process tomography simulator";

  m.def(
      "make_channel",
      [](const std::string& spec) {
        const ChiMatrix chi = make_channel(parse_channel_spec(spec));
        return py::make_tuple(chi.mat, chi.trace_preserving);
      },
      py::arg("spec"),
      "Build a reference channel process matrix; returns (chi, trace_preserving).");

  m.def(
      "purity",
      [](const CMatrix& chi, bool tp) { return purity(chi_from_array(chi, tp)); },
      py::arg("chi"), py::arg("trace_preserving") = false);

  m.def(
      "average_transmittance",
      [](const CMatrix& chi, bool tp) { return average_transmittance(chi_from_array(chi, tp)); },
      py::arg("chi"), py::arg("trace_preserving") = false);

  m.def("bures_distance_sq", &bures_distance_sq, py::arg("a"), py::arg("b"),
        "Squared Bures distance between Hermitian PSD matrices.");

  m.def(
      "process_distance",
      [](const CMatrix& a, const CMatrix& b) { return bures_distance_sq(a, b); },
      py::arg("chi_a"), py::arg("chi_b"));

  m.def(
      "kraus_to_chi",
      [](const std::vector<CMatrix>& elements) {
        if (elements.empty()) throw std::invalid_argument("need at least one element");
        KrausSet ks{static_cast<int>(elements.front().rows()), elements, false};
        const ChiMatrix chi = kraus_to_chi(ks);
        return py::make_tuple(chi.mat, chi.trace_preserving);
      },
      py::arg("elements"));

  m.def(
      "chi_to_kraus",
      [](const CMatrix& chi, bool tp) {
        const KrausSet ks = chi_to_kraus(chi_from_array(chi, tp));
        return ks.elements;
      },
      py::arg("chi"), py::arg("trace_preserving") = false);

  m.def(
      "apply_channel",
      [](const CMatrix& chi, bool tp, const CMatrix& rho) {
        const DensityMatrix out =
            apply_channel_chi(chi_from_array(chi, tp), DensityMatrix{static_cast<int>(rho.rows()), rho});
        return out.mat;
      },
      py::arg("chi"), py::arg("trace_preserving"), py::arg("rho"));

  m.def(
      "prepared_state",
      [](const std::vector<double>& angles) { return prepared_state(config_from_angles(angles)).mat; },
      py::arg("config"));

  m.def(
      "measurement_povm",
      [](const std::vector<double>& angles) {
        const auto [m0, m1] = measurement_povm(config_from_angles(angles));
        return py::make_tuple(m0, m1);
      },
      py::arg("config"));

  m.def(
      "outcome_prob",
      [](const CMatrix& chi, bool tp, const std::vector<double>& angles, int gamma) {
        return outcome_prob(chi_from_array(chi, tp), config_from_angles(angles), gamma);
      },
      py::arg("chi"), py::arg("trace_preserving"), py::arg("config"), py::arg("gamma"));

  m.def(
      "haar_random_unitary",
      [](int rows, int cols, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        return haar_random_unitary(rows, cols, rng);
      },
      py::arg("rows"), py::arg("cols"), py::arg("seed") = 0);

  m.def(
      "fit_waveplate",
      [](const CMatrix& chi, bool tp) {
        const WaveplateFit fit = fit_waveplate(chi_from_array(chi, tp));
        return py::make_tuple(fit.theta_deg, fit.delta_rad, fit.residual);
      },
      py::arg("chi"), py::arg("trace_preserving") = true,
      "Recover (theta_deg, delta_rad, residual) of a single-retarder process.");

  m.def(
      "power_law_fit",
      [](const std::vector<double>& n, const std::vector<double>& y, double n_min, double n_max) {
        return fit_to_dict(power_law_fit(n, y, n_min, n_max));
      },
      py::arg("n"), py::arg("y"), py::arg("n_min"), py::arg("n_max"));

  m.def(
      "plateau_detect",
      [](const std::vector<double>& n, const std::vector<double>& y, int window,
         double slope_thresh) -> py::object {
        const auto res = plateau_detect(n, y, window, slope_thresh);
        return res ? py::cast(*res) : py::none();
      },
      py::arg("n"), py::arg("y"), py::arg("window") = 5, py::arg("slope_thresh") = -0.25);

  m.def(
      "run_tomography",
      [](const std::string& channel, const std::string& mode, const std::string& strategy,
         int particles, double noise_deg, long max_events, std::uint64_t seed, int pool, long bmin,
         double eta, int checkpoints_per_decade, double intensity0, double intensity1, double t_cal,
         int mh_steps, double mh_scale) {
        const RunConfig cfg = build_run_config(channel, mode, strategy, particles, noise_deg,
                                               max_events, seed, pool, bmin, eta,
                                               checkpoints_per_decade, intensity0, intensity1,
                                               t_cal, mh_steps, mh_scale);
        return run_to_dict(run_tomography(cfg));
      },
      py::arg("channel") = "identity", py::arg("mode") = "tp", py::arg("strategy") = "adaptive",
      py::arg("particles") = 0, py::arg("noise_deg") = 0.0, py::arg("max_events") = 10000,
      py::arg("seed") = 0, py::arg("pool") = 300, py::arg("bmin") = 5, py::arg("eta") = 0.05,
      py::arg("checkpoints_per_decade") = 20, py::arg("intensity0") = 1e4,
      py::arg("intensity1") = 1e4, py::arg("t_cal") = 100.0, py::arg("mh_steps") = 60,
      py::arg("mh_scale") = 0.15,
      "Run one simulated tomography experiment; returns the trace and the final estimate.");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
