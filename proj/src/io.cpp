#include "aqpt/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aqpt {

namespace {

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "adaptive") return Strategy::adaptive;
  if (s == "random") return Strategy::random;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

Mode mode_from_string(const std::string& s) {
  if (s == "tp") return Mode::tp;
  if (s == "lossy") return Mode::lossy;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

}  // namespace

Json chi_to_json(const ChiMatrix& chi) {
  Json mat = Json::array();
  for (Eigen::Index r = 0; r < chi.mat.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < chi.mat.cols(); ++c) row.push_back(complex_to_json(chi.mat(r, c)));
    mat.push_back(std::move(row));
  }
  return Json{{"d", chi.dim}, {"trace_preserving", chi.trace_preserving}, {"mat", std::move(mat)}};
}

ChiMatrix chi_from_json(const Json& j) {
  ChiMatrix chi;
  chi.dim = j.at("d").get<int>();
  chi.trace_preserving = j.at("trace_preserving").get<bool>();
  const auto& mat = j.at("mat");
  const int d2 = chi.dim * chi.dim;
  if (static_cast<int>(mat.size()) != d2) throw std::invalid_argument("chi json: bad row count");
  chi.mat = CMatrix(d2, d2);
  for (int r = 0; r < d2; ++r) {
    if (static_cast<int>(mat[r].size()) != d2) {
      throw std::invalid_argument("chi json: bad column count");
    }
    for (int c = 0; c < d2; ++c) chi.mat(r, c) = complex_from_json(mat[r][c]);
  }
  return chi;
}

Json trace_point_to_json(const TracePoint& pt) {
  Json j;
  j["N"] = pt.n;
  if (pt.d2_truth.has_value()) {
    j["d2_truth"] = *pt.d2_truth;
  } else {
    j["d2_truth"] = nullptr;
  }
  j["dist_size"] = pt.dist_size;
  j["chi2_norm"] = pt.chi2_norm;
  if (pt.r_dd.has_value()) {
    j["r_dd"] = *pt.r_dd;
  } else {
    j["r_dd"] = nullptr;
  }
  j["ess"] = pt.ess;
  return j;
}

TracePoint trace_point_from_json(const Json& j) {
  TracePoint pt;
  pt.n = j.at("N").get<long>();
  if (!j.at("d2_truth").is_null()) pt.d2_truth = j.at("d2_truth").get<double>();
  pt.dist_size = j.at("dist_size").get<double>();
  pt.chi2_norm = j.at("chi2_norm").get<double>();
  if (j.contains("r_dd") && !j.at("r_dd").is_null()) pt.r_dd = j.at("r_dd").get<double>();
  pt.ess = j.value("ess", 0.0);
  return pt;
}

Json count_record_to_json(const CountRecord& rec) {
  Json j;
  j["cfg"] = Json::array({rec.config.prep_hwp, rec.config.prep_qwp, rec.config.meas_qwp,
                          rec.config.meas_hwp});
  j["n"] = Json::array({rec.n0, rec.n1});
  if (rec.mode == Mode::tp) {
    j["b"] = rec.block;
    j["mode"] = "tp";
  } else {
    j["t"] = rec.duration;
    j["mode"] = "lossy";
  }
  return j;
}

CountRecord count_record_from_json(const Json& j) {
  CountRecord rec;
  const auto& cfg = j.at("cfg");
  if (cfg.size() != 4) throw std::invalid_argument("count record: cfg expects four angles");
  rec.config = MeasurementConfig{cfg[0].get<double>(), cfg[1].get<double>(), cfg[2].get<double>(),
                                 cfg[3].get<double>()};
  rec.n0 = j.at("n")[0].get<long>();
  rec.n1 = j.at("n")[1].get<long>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "tp") {
    rec.mode = Mode::tp;
    rec.block = j.at("b").get<long>();
  } else if (mode == "lossy") {
    rec.mode = Mode::lossy;
    rec.duration = j.at("t").get<double>();
  } else {
    throw std::invalid_argument("count record: unknown mode '" + mode + "'");
  }
  return rec;
}

std::string count_records_to_jsonl(const std::vector<LikelihoodBlock>& history) {
  std::ostringstream out;
  for (const auto& blk : history) out << count_record_to_json(to_count_record(blk)).dump() << '\n';
  return out.str();
}

std::string trace_to_jsonl(const std::vector<TracePoint>& trace) {
  std::ostringstream out;
  for (const auto& pt : trace) out << trace_point_to_json(pt).dump() << '\n';
  return out.str();
}

std::vector<TracePoint> trace_from_jsonl(const std::string& text) {
  std::vector<TracePoint> trace;
  std::istringstream in(text);
  std::string line;
  long last_n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    trace.push_back(trace_point_from_json(Json::parse(line)));
    if (trace.size() > 1 && trace.back().n <= last_n) {
      throw std::invalid_argument("trace: N column must be strictly increasing");
    }
    last_n = trace.back().n;
  }
  return trace;
}

Json mean_trace_to_json_lines(const MeanTrace& mean) {
  Json lines = Json::array();
  for (size_t i = 0; i < mean.n.size(); ++i) {
    Json j;
    j["N"] = mean.n[i];
    j["d2_truth"] = mean.d2_truth[i];
    j["dist_size"] = mean.dist_size[i];
    j["chi2_norm"] = mean.chi2_norm[i];
    j["r_dd"] = mean.r_dd[i];
    j["ess"] = mean.ess[i];
    j["d2_truth_se"] = mean.d2_truth_se[i];
    j["dist_size_se"] = mean.dist_size_se[i];
    j["chi2_norm_se"] = mean.chi2_norm_se[i];
    lines.push_back(std::move(j));
  }
  return lines;
}

Json fit_to_json(const PowerLawFit& fit) {
  return Json{{"C", fit.c},
              {"alpha", fit.alpha},
              {"stderr_C", fit.stderr_c},
              {"stderr_alpha", fit.stderr_alpha},
              {"n_points", fit.n_points},
              {"range", Json::array({fit.n_min, fit.n_max})}};
}

Json run_config_to_json(const RunConfig& cfg) {
  Json j;
  j["channel"] = channel_spec_to_string(cfg.channel);
  j["mode"] = cfg.mode == Mode::tp ? "tp" : "lossy";
  j["strategy"] = cfg.planner.strategy == Strategy::adaptive ? "adaptive" : "random";
  j["pool"] = cfg.planner.pool_size;
  j["bmin"] = cfg.planner.b_min;
  j["eta"] = cfg.planner.eta;
  j["particles"] = cfg.particles;
  j["noise_deg"] = cfg.noise_deg;
  j["max_events"] = cfg.max_events;
  j["seed"] = cfg.seed;
  j["checkpoints_per_decade"] = cfg.checkpoints_per_decade;
  j["intensity0"] = cfg.source.intensity0;
  j["intensity1"] = cfg.source.intensity1;
  j["t_cal"] = cfg.t_cal;
  j["mh_steps"] = cfg.resample_opts.mh_steps;
  j["mh_scale"] = cfg.resample_opts.scale_c;
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig cfg;
  if (j.contains("channel")) cfg.channel = parse_channel_spec(j["channel"].get<std::string>());
  if (j.contains("mode")) cfg.mode = mode_from_string(j["mode"].get<std::string>());
  if (j.contains("strategy")) {
    cfg.planner.strategy = strategy_from_string(j["strategy"].get<std::string>());
  }
  if (j.contains("pool")) cfg.planner.pool_size = j["pool"].get<int>();
  if (j.contains("bmin")) cfg.planner.b_min = j["bmin"].get<long>();
  if (j.contains("eta")) cfg.planner.eta = j["eta"].get<double>();
  if (j.contains("particles")) cfg.particles = j["particles"].get<int>();
  if (j.contains("noise_deg")) cfg.noise_deg = j["noise_deg"].get<double>();
  if (j.contains("max_events")) cfg.max_events = j["max_events"].get<long>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("checkpoints_per_decade")) {
    cfg.checkpoints_per_decade = j["checkpoints_per_decade"].get<int>();
  }
  if (j.contains("intensity0")) cfg.source.intensity0 = j["intensity0"].get<double>();
  if (j.contains("intensity1")) cfg.source.intensity1 = j["intensity1"].get<double>();
  if (j.contains("t_cal")) cfg.t_cal = j["t_cal"].get<double>();
  if (j.contains("mh_steps")) cfg.resample_opts.mh_steps = j["mh_steps"].get<int>();
  if (j.contains("mh_scale")) cfg.resample_opts.scale_c = j["mh_scale"].get<double>();
  return cfg;
}

SweepConfig sweep_config_from_json(const Json& j) {
  SweepConfig cfg;
  cfg.base = run_config_from_json(j.at("base"));
  if (j.contains("axes")) {
    const auto& axes = j["axes"];
    if (axes.contains("channel")) {
      for (const auto& c : axes["channel"]) {
        cfg.axes.channels.push_back(parse_channel_spec(c.get<std::string>()));
      }
    }
    if (axes.contains("strategy")) {
      for (const auto& s : axes["strategy"]) {
        cfg.axes.strategies.push_back(strategy_from_string(s.get<std::string>()));
      }
    }
    if (axes.contains("noise_deg")) {
      for (const auto& n : axes["noise_deg"]) cfg.axes.noise_deg.push_back(n.get<double>());
    }
  }
  if (j.contains("repeats")) cfg.repeats = j["repeats"].get<int>();
  if (j.contains("seeds")) {
    for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
  }
  return cfg;
}

Json ensemble_snapshot_to_json(const ParticleEnsemble& ens) {
  Json particles = Json::array();
  for (const auto& p : ens.particles) {
    ChiMatrix chi{ens.dim, p.chi, ens.mode == Mode::tp};
    particles.push_back(Json{{"weight", std::exp(p.log_weight)}, {"chi", chi_to_json(chi)}});
  }
  return Json{{"mode", ens.mode == Mode::tp ? "tp" : "lossy"},
              {"particles", std::move(particles)}};
}

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace aqpt
