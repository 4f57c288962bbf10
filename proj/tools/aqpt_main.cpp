#include "aqpt/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

namespace {

using namespace aqpt;

struct RunCliOptions {
  std::string channel = "identity";
  std::string mode = "tp";
  std::string strategy = "adaptive";
  int particles = 0;
  double noise_deg = 0.0;
  long max_events = 100000;
  std::uint64_t seed = 0;
  std::string out_dir = "aqpt-run";
  int pool = 300;
  long bmin = 5;
  double eta = 0.05;
  int checkpoints = 20;
  double intensity0 = 1e4;
  double intensity1 = 1e4;
  double t_cal = 100.0;
  int mh_steps = 60;
  double mh_scale = 0.15;
  std::string dump_ensemble;
  std::string dump_counts;
};

RunConfig to_run_config(const RunCliOptions& o) {
  Json j;
  j["channel"] = o.channel;
  j["mode"] = o.mode;
  j["strategy"] = o.strategy;
  j["pool"] = o.pool;
  j["bmin"] = o.bmin;
  j["eta"] = o.eta;
  j["particles"] = o.particles;
  j["noise_deg"] = o.noise_deg;
  j["max_events"] = o.max_events;
  j["seed"] = o.seed;
  j["checkpoints_per_decade"] = o.checkpoints;
  j["intensity0"] = o.intensity0;
  j["intensity1"] = o.intensity1;
  j["t_cal"] = o.t_cal;
  j["mh_steps"] = o.mh_steps;
  j["mh_scale"] = o.mh_scale;
  return run_config_from_json(j);
}

int cmd_run(const RunCliOptions& opts) {
  const RunConfig cfg = to_run_config(opts);
  ParticleEnsemble final_ensemble;
  const bool want_ensemble = !opts.dump_ensemble.empty() || !opts.dump_counts.empty();
  const RunResult result = run_tomography(cfg, want_ensemble ? &final_ensemble : nullptr);

  namespace fs = std::filesystem;
  const fs::path out(opts.out_dir);
  atomic_write_text((out / "trace.jsonl").string(), trace_to_jsonl(result.trace));
  atomic_write_text((out / "estimate.json").string(), chi_to_json(result.estimate).dump(2) + "\n");
  if (!opts.dump_ensemble.empty()) {
    atomic_write_text(opts.dump_ensemble, ensemble_snapshot_to_json(final_ensemble).dump() + "\n");
  }
  if (!opts.dump_counts.empty()) {
    atomic_write_text(opts.dump_counts, count_records_to_jsonl(final_ensemble.history));
  }

  const TracePoint& last = result.trace.back();
  std::cout << "events " << last.n << "  d2_truth " << last.d2_truth.value_or(0.0)
            << "  dist_size " << last.dist_size << "  ess " << last.ess << "\n"
            << "wrote " << (out / "trace.jsonl").string() << " and "
            << (out / "estimate.json").string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, int jobs, const std::string& out_dir) {
  const SweepConfig cfg = sweep_config_from_json(Json::parse(read_text(config_path)));
  const SweepReport report = run_sweep(cfg, jobs);

  namespace fs = std::filesystem;
  Json summary = Json::array();
  for (const auto& cell : report.cells) {
    std::string dir_name = cell.name;
    for (auto& ch : dir_name) {
      if (ch == ',' ) ch = '_';
      if (ch == ':' || ch == '=') ch = '-';
    }
    const fs::path cell_dir = fs::path(out_dir) / dir_name;

    std::string lines;
    for (const auto& j : mean_trace_to_json_lines(cell.mean)) lines += j.dump() + "\n";
    atomic_write_text((cell_dir / "trace_mean.jsonl").string(), lines);

    Json cell_json;
    cell_json["name"] = cell.name;
    cell_json["config"] = run_config_to_json(cell.config);
    cell_json["d2_fit"] = cell.d2_fit ? fit_to_json(*cell.d2_fit) : Json(nullptr);
    cell_json["dist_fit"] = cell.dist_fit ? fit_to_json(*cell.dist_fit) : Json(nullptr);
    cell_json["plateau_chi2"] = cell.plateau_chi2 ? Json(*cell.plateau_chi2) : Json(nullptr);
    cell_json["plateau_d2"] = cell.plateau_d2 ? Json(*cell.plateau_d2) : Json(nullptr);
    atomic_write_text((cell_dir / "fit.json").string(), cell_json.dump(2) + "\n");
    summary.push_back(std::move(cell_json));
  }
  atomic_write_text((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
  std::cout << report.cells.size() << " cells written to " << out_dir << "\n";
  return 0;
}

int cmd_fit(const std::string& in_path, const std::string& range, const std::string& field_name,
            const std::string& out_path) {
  const auto trace = trace_from_jsonl(read_text(in_path));
  double lo = 0, hi = 0;
  const size_t colon = range.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("--range expects NMIN:NMAX");
  lo = std::stod(range.substr(0, colon));
  hi = std::stod(range.substr(colon + 1));

  TraceField field = TraceField::d2_truth;
  if (field_name == "dist_size") {
    field = TraceField::dist_size;
  } else if (field_name == "chi2_norm") {
    field = TraceField::chi2_norm;
  } else if (field_name != "d2_truth") {
    throw std::invalid_argument("--field must be d2_truth, dist_size or chi2_norm");
  }

  std::vector<double> n, y;
  for (const auto& pt : trace) {
    n.push_back(static_cast<double>(pt.n));
    y.push_back(trace_field(pt, field));
  }
  const PowerLawFit fit = power_law_fit(n, y, lo, hi);
  const std::string text = fit_to_json(fit).dump() + "\n";
  std::cout << text;
  if (!out_path.empty()) atomic_write_text(out_path, text);
  return 0;
}

int cmd_channel_info(const std::string& spec_text) {
  const ChannelSpec spec = parse_channel_spec(spec_text);
  const ChiMatrix chi = make_channel(spec);
  std::cout << "channel " << channel_spec_to_string(spec) << "\n";
  std::cout << "chi =\n" << chi.mat << "\n";
  std::cout << "trace_preserving = " << (chi.trace_preserving ? "true" : "false") << "\n";
  std::cout << "purity = " << purity(chi) << "\n";
  std::cout << "transmittance = " << average_transmittance(chi) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Bayesian process tomography simulator"};
  app.require_subcommand(1);

  RunCliOptions run_opts;
  auto* run = app.add_subcommand("run", "Run a single tomography simulation");
  run->add_option("--channel", run_opts.channel, "Channel spec, e.g. identity, depol:0.5");
  run->add_option("--mode", run_opts.mode, "tp or lossy")->check(CLI::IsMember({"tp", "lossy"}));
  run->add_option("--strategy", run_opts.strategy, "adaptive or random")
      ->check(CLI::IsMember({"adaptive", "random"}));
  run->add_option("--particles", run_opts.particles, "Posterior samples (0 = mode default)");
  run->add_option("--noise-deg", run_opts.noise_deg, "Wave plate jitter half-width, degrees");
  run->add_option("--max-events", run_opts.max_events, "Total detection events");
  run->add_option("--seed", run_opts.seed, "RNG seed");
  run->add_option("--out", run_opts.out_dir, "Output directory");
  run->add_option("--pool", run_opts.pool, "Adaptive candidate pool size");
  run->add_option("--bmin", run_opts.bmin, "Minimum block size");
  run->add_option("--eta", run_opts.eta, "Block size fraction of N");
  run->add_option("--checkpoints", run_opts.checkpoints, "Checkpoints per decade");
  run->add_option("--intensity0", run_opts.intensity0, "Detector 0 source rate (lossy)");
  run->add_option("--intensity1", run_opts.intensity1, "Detector 1 source rate (lossy)");
  run->add_option("--tcal", run_opts.t_cal, "Calibration duration (lossy)");
  run->add_option("--mh-steps", run_opts.mh_steps, "Metropolis-Hastings steps per resampling");
  run->add_option("--mh-scale", run_opts.mh_scale, "Proposal scale constant");
  run->add_option("--dump-ensemble", run_opts.dump_ensemble, "Write final ensemble JSON here");
  run->add_option("--dump-counts", run_opts.dump_counts, "Write per-block count records here");

  std::string sweep_config;
  int sweep_jobs = 1;
  std::string sweep_out = "aqpt-sweep";
  auto* sweep = app.add_subcommand("sweep", "Run a sweep over channels/strategies/noise");
  sweep->add_option("--config", sweep_config, "Sweep config JSON")->required();
  sweep->add_option("--jobs", sweep_jobs, "Parallel runs");
  sweep->add_option("--out-dir", sweep_out, "Output directory");

  std::string fit_in, fit_range, fit_field = "d2_truth", fit_out;
  auto* fit = app.add_subcommand("fit", "Power-law fit of a trace column");
  fit->add_option("--in", fit_in, "Trace JSONL path")->required();
  fit->add_option("--range", fit_range, "NMIN:NMAX fit range")->required();
  fit->add_option("--field", fit_field, "d2_truth, dist_size or chi2_norm");
  fit->add_option("--out", fit_out, "Also write the fit JSON here");

  std::string info_spec;
  auto* info = app.add_subcommand("channel-info", "Print a channel's process matrix and metrics");
  info->add_option("spec", info_spec, "Channel spec")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_config, sweep_jobs, sweep_out);
    if (*fit) return cmd_fit(fit_in, fit_range, fit_field, fit_out);
    if (*info) return cmd_channel_info(info_spec);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
