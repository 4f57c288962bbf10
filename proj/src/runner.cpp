#include "aqpt/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace aqpt {

int effective_particles(const RunConfig& cfg) {
  if (cfg.particles > 0) return cfg.particles;
  return cfg.mode == Mode::tp ? 1000 : 10000;
}

void validate(const RunConfig& cfg) {
  if (cfg.max_events < cfg.planner.b_min) {
    throw std::invalid_argument("RunConfig: max_events below the minimum block size");
  }
  if (effective_particles(cfg) < 2) throw std::invalid_argument("RunConfig: particles must be >= 2");
  if (cfg.checkpoints_per_decade < 1) {
    throw std::invalid_argument("RunConfig: checkpoints_per_decade must be >= 1");
  }
  if (cfg.noise_deg < 0 || cfg.noise_deg > 45) {
    throw std::invalid_argument("RunConfig: noise_deg must be in [0, 45]");
  }
  if (cfg.mode == Mode::lossy && (cfg.source.intensity0 <= 0 || cfg.source.intensity1 <= 0)) {
    throw std::invalid_argument("RunConfig: lossy mode needs positive source intensities");
  }
  make_channel(cfg.channel);  // parameter range check
}

RunResult run_tomography(const RunConfig& cfg, ParticleEnsemble* final_ensemble) {
  validate(cfg);
  Rng rng = make_rng(cfg.seed);
  const ChiMatrix truth = make_channel(cfg.channel);
  const int s_total = effective_particles(cfg);
  const NoiseModel noise{cfg.noise_deg};

  ParticleEnsemble ens = init_ensemble(s_total, 2, cfg.mode, rng);
  double mean_intensity = 1.0;
  if (cfg.mode == Mode::lossy) {
    ens.calibration = calibrate(cfg.source, cfg.t_cal, rng);
    mean_intensity = 0.5 * (cfg.source.intensity0 + cfg.source.intensity1);
  }

  // Log-spaced checkpoint grid anchored at b_min; identical for every run
  // with the same schedule, so traces average without interpolation.
  const double grid_factor = std::pow(10.0, 1.0 / cfg.checkpoints_per_decade);
  double next_checkpoint = static_cast<double>(cfg.planner.b_min);

  // The proposal coefficient tracks the acceptance ratio: the same coefficient
  // does not fit both rank-1 and full-rank posteriors.
  ResampleOptions mh = cfg.resample_opts;

  std::vector<TracePoint> trace;
  long events = 0;
  while (events < cfg.max_events) {
    const long b = std::min(block_size(events, cfg.planner), cfg.max_events - events);
    const MeasurementConfig mc = next_config(ens, cfg.planner, rng);
    const CountRecord rec =
        cfg.mode == Mode::tp
            ? simulate_block_tp(truth, mc, b, noise, rng)
            : simulate_block_lossy(truth, mc, b / mean_intensity, cfg.source, noise, rng);
    update_weights(ens, rec);
    if (effective_sample_size(ens) < 0.1 * s_total) {
      const ResampleStats stats = resample(ens, rng, mh);
      if (stats.acceptance < 0.2) {
        mh.scale_c = std::max(0.7 * mh.scale_c, 0.02);
      } else if (stats.acceptance > 0.4) {
        mh.scale_c = std::min(1.3 * mh.scale_c, 1.0);
      }
    }
    events += b;

    if (events >= static_cast<long>(next_checkpoint)) {
      while (events >= static_cast<long>(next_checkpoint)) {
        next_checkpoint = std::max(std::ceil(next_checkpoint * grid_factor), next_checkpoint + 1);
      }
      const ChiMatrix estimate = bme(ens);
      TracePoint pt;
      pt.n = events;
      pt.d2_truth = process_distance(estimate, truth);
      pt.dist_size = distribution_size(ens);
      const double block_total =
          rec.mode == Mode::tp ? static_cast<double>(rec.block) : static_cast<double>(rec.n0 + rec.n1);
      pt.chi2_norm = block_total > 0 ? chi_squared(rec, estimate) / block_total : 0.0;
      pt.r_dd = r_dd(pt.d2_truth, pt.dist_size);
      pt.ess = effective_sample_size(ens);
      trace.push_back(pt);
    }
  }

  RunResult result{std::move(trace), bme(ens), truth};
  if (final_ensemble != nullptr) *final_ensemble = std::move(ens);
  return result;
}

std::vector<RunResult> run_repeats(const RunConfig& base, int repeats, int jobs) {
  std::vector<std::uint64_t> seeds(repeats);
  for (int i = 0; i < repeats; ++i) seeds[i] = derive_seed(base.seed, static_cast<std::uint64_t>(i));
  return run_repeats(base, seeds, jobs);
}

std::vector<RunResult> run_repeats(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                                   int jobs) {
  const int total = static_cast<int>(seeds.size());
  std::vector<RunResult> results(total);
  std::atomic<int> next{0};
  std::vector<std::string> errors(total);

  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= total) return;
      RunConfig cfg = base;
      cfg.seed = seeds[i];
      try {
        results[i] = run_tomography(cfg);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min(jobs, total); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (int i = 0; i < total; ++i) {
    if (!errors[i].empty()) {
      throw std::runtime_error("repeat " + std::to_string(i) + " failed: " + errors[i]);
    }
  }
  return results;
}

MeanTrace average_traces(const std::vector<RunResult>& results) {
  if (results.empty()) throw std::invalid_argument("average_traces: no runs");
  const size_t len = results.front().trace.size();
  for (const auto& r : results) {
    if (r.trace.size() != len) {
      throw std::runtime_error("average_traces: checkpoint grids differ between runs");
    }
  }
  const double runs = static_cast<double>(results.size());
  MeanTrace out;
  out.n.resize(len);
  out.d2_truth.assign(len, 0.0);
  out.d2_truth_se.assign(len, 0.0);
  out.dist_size.assign(len, 0.0);
  out.dist_size_se.assign(len, 0.0);
  out.chi2_norm.assign(len, 0.0);
  out.chi2_norm_se.assign(len, 0.0);
  out.r_dd.assign(len, 0.0);
  out.ess.assign(len, 0.0);

  for (size_t i = 0; i < len; ++i) {
    out.n[i] = results.front().trace[i].n;
    double sd2 = 0, sds = 0, sc2 = 0, ses = 0;
    double qd2 = 0, qds = 0, qc2 = 0;
    for (const auto& r : results) {
      const TracePoint& pt = r.trace[i];
      if (pt.n != out.n[i]) {
        throw std::runtime_error("average_traces: checkpoint grids differ between runs");
      }
      const double d2 = pt.d2_truth.value_or(0.0);
      sd2 += d2;
      qd2 += d2 * d2;
      sds += pt.dist_size;
      qds += pt.dist_size * pt.dist_size;
      sc2 += pt.chi2_norm;
      qc2 += pt.chi2_norm * pt.chi2_norm;
      ses += pt.ess;
    }
    out.d2_truth[i] = sd2 / runs;
    out.dist_size[i] = sds / runs;
    out.chi2_norm[i] = sc2 / runs;
    out.ess[i] = ses / runs;
    if (results.size() > 1) {
      auto se = [&](double sum, double sumsq) {
        const double var = std::max(0.0, (sumsq - sum * sum / runs) / (runs - 1.0));
        return std::sqrt(var / runs);
      };
      out.d2_truth_se[i] = se(sd2, qd2);
      out.dist_size_se[i] = se(sds, qds);
      out.chi2_norm_se[i] = se(sc2, qc2);
    }
    out.r_dd[i] = out.dist_size[i] > 1e-15 ? out.d2_truth[i] / out.dist_size[i] : 0.0;
  }
  return out;
}

void validate(const SweepConfig& cfg) {
  validate(cfg.base);
  if (cfg.repeats < 1) throw std::invalid_argument("SweepConfig: repeats must be >= 1");
  if (!cfg.seeds.empty()) {
    if (static_cast<int>(cfg.seeds.size()) != cfg.repeats) {
      throw std::invalid_argument("SweepConfig: seeds list must match repeats");
    }
    std::vector<std::uint64_t> sorted = cfg.seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("SweepConfig: duplicate seeds across repeats");
    }
  }
}

SweepReport run_sweep(const SweepConfig& cfg, int jobs) {
  validate(cfg);
  const std::vector<ChannelSpec> channels =
      cfg.axes.channels.empty() ? std::vector<ChannelSpec>{cfg.base.channel} : cfg.axes.channels;
  const std::vector<Strategy> strategies = cfg.axes.strategies.empty()
                                               ? std::vector<Strategy>{cfg.base.planner.strategy}
                                               : cfg.axes.strategies;
  const std::vector<double> noises =
      cfg.axes.noise_deg.empty() ? std::vector<double>{cfg.base.noise_deg} : cfg.axes.noise_deg;

  SweepReport report;
  for (const auto& ch : channels) {
    for (const auto st : strategies) {
      for (const double nz : noises) {
        RunConfig rc = cfg.base;
        rc.channel = ch;
        rc.planner.strategy = st;
        rc.noise_deg = nz;

        std::ostringstream name;
        name << "channel=" << channel_spec_to_string(ch)
             << ",strategy=" << (st == Strategy::adaptive ? "adaptive" : "random")
             << ",noise=" << nz;

        const std::vector<RunResult> runs =
            cfg.seeds.empty() ? run_repeats(rc, cfg.repeats, jobs)
                              : run_repeats(rc, cfg.seeds, jobs);

        SweepCell cell;
        cell.name = name.str();
        cell.config = rc;
        cell.mean = average_traces(runs);

        std::vector<double> nd(cell.mean.n.begin(), cell.mean.n.end());
        const double fit_lo = 1e3;
        const double fit_hi = static_cast<double>(rc.max_events);
        try {
          cell.d2_fit = power_law_fit(nd, cell.mean.d2_truth, fit_lo, fit_hi);
        } catch (const std::invalid_argument&) {
        }
        try {
          cell.dist_fit = power_law_fit(nd, cell.mean.dist_size, fit_lo, fit_hi);
        } catch (const std::invalid_argument&) {
        }
        // The plateau watch starts where the fit window opens; the first
        // checkpoints are flat only because nothing has been learned yet.
        std::vector<double> n_late, c2_late, d2_late;
        const std::vector<double> c2_smooth = moving_average(cell.mean.chi2_norm, 5);
        for (size_t i = 0; i < nd.size(); ++i) {
          if (nd[i] < fit_lo) continue;
          n_late.push_back(nd[i]);
          c2_late.push_back(c2_smooth[i]);
          d2_late.push_back(cell.mean.d2_truth[i]);
        }
        cell.plateau_chi2 = plateau_detect(n_late, c2_late, 5, -0.25);
        cell.plateau_d2 = plateau_detect(n_late, d2_late, 5, -0.25);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

}  // namespace aqpt
