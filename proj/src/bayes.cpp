#include "aqpt/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aqpt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double block_log_likelihood(const LikelihoodBlock& blk, const CMatrix& chi,
                            const Calibration& cal) {
  const double p0 = std::clamp(trace_prob(blk.eff0, chi), 0.0, 1.0);
  if (blk.mode == Mode::tp) {
    double ll = 0.0;
    if (blk.n0 > 0) ll += blk.n0 * std::log(p0);
    if (blk.n1 > 0) ll += blk.n1 * std::log1p(-p0);
    return ll;
  }
  const double p1 = std::clamp(trace_prob(blk.eff1, chi), 0.0, 1.0);
  double ll = -(cal.intensity0 * p0 + cal.intensity1 * p1) * blk.duration;
  if (blk.n0 > 0) ll += blk.n0 * std::log(p0);
  if (blk.n1 > 0) ll += blk.n1 * std::log(p1);
  return ll;
}

void normalize_log_weights(ParticleEnsemble& ens) {
  double mx = kNegInf;
  for (const auto& p : ens.particles) mx = std::max(mx, p.log_weight);
  if (mx == kNegInf) {
    throw DegenerateEnsembleError("all particle weights underflowed to zero");
  }
  double sum = 0.0;
  for (const auto& p : ens.particles) sum += std::exp(p.log_weight - mx);
  const double lse = mx + std::log(sum);
  for (auto& p : ens.particles) p.log_weight -= lse;
}

}  // namespace

CountRecord to_count_record(const LikelihoodBlock& blk) {
  return CountRecord{blk.config, blk.n0, blk.n1, blk.block, blk.duration, blk.mode};
}

CMatrix chi_from_dilation(const CMatrix& dilation, int d) {
  const int k = std::min<int>(static_cast<int>(dilation.rows()) / d, d * d);
  CMatrix chi = CMatrix::Zero(d * d, d * d);
  CVector v(d * d);
  for (int i = 0; i < k; ++i) {
    for (int l = 0; l < d; ++l) {
      for (int lp = 0; lp < d; ++lp) v[l * d + lp] = dilation(i * d + l, lp);
    }
    chi += v * v.adjoint();
  }
  return chi;
}

ParticleEnsemble init_ensemble(int num_particles, int dim, Mode mode, Rng& rng) {
  if (num_particles < 2) throw std::invalid_argument("init_ensemble: need at least 2 particles");
  if (dim < 2) throw std::invalid_argument("init_ensemble: dim must be at least 2");
  const int rows = mode == Mode::tp ? dim * dim * dim : dim * dim * dim + dim;
  ParticleEnsemble ens;
  ens.dim = dim;
  ens.mode = mode;
  ens.particles.reserve(num_particles);
  const double lw = -std::log(static_cast<double>(num_particles));
  for (int s = 0; s < num_particles; ++s) {
    CMatrix u = haar_random_unitary(rows, dim, rng);
    ens.particles.push_back(Particle{chi_from_dilation(u, dim), std::move(u), lw});
  }
  return ens;
}

void update_weights(ParticleEnsemble& ens, const CountRecord& rec) {
  if (rec.mode != ens.mode) throw std::invalid_argument("update_weights: mode mismatch");
  if (rec.n0 == 0 && rec.n1 == 0 && rec.block == 0) return;
  const DensityMatrix rho = prepared_state(rec.config);
  const auto [m0, m1] = measurement_povm(rec.config);
  LikelihoodBlock blk{rec.config, effective_op(m0, rho), effective_op(m1, rho), rec.n0,
                      rec.n1,     rec.block,             rec.duration,          rec.mode};
  for (auto& p : ens.particles) {
    p.log_weight += block_log_likelihood(blk, p.chi, ens.calibration);
  }
  ens.history.push_back(std::move(blk));
  normalize_log_weights(ens);
}

ChiMatrix bme(const ParticleEnsemble& ens) {
  const int d2 = ens.dim * ens.dim;
  CMatrix acc = CMatrix::Zero(d2, d2);
  for (const auto& p : ens.particles) acc += std::exp(p.log_weight) * p.chi;
  return ChiMatrix{ens.dim, std::move(acc), ens.mode == Mode::tp};
}

double distribution_size(const ParticleEnsemble& ens) {
  const ChiMatrix mean = bme(ens);
  const CMatrix sqrt_mean = psd_sqrt(mean.mat, kEigClip);
  const double tr_mean = mean.mat.trace().real();
  double acc = 0.0;
  for (const auto& p : ens.particles) {
    const CMatrix inner = sqrt_mean * p.chi * sqrt_mean;
    RVector lam = hermitian_eigenvalues(inner);
    double fid = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (lam[i] > 0) fid += std::sqrt(lam[i]);
    }
    const double d2 = tr_mean + p.chi.trace().real() - 2.0 * fid;
    acc += std::exp(p.log_weight) * std::max(d2, 0.0);
  }
  return acc;
}

double effective_sample_size(const ParticleEnsemble& ens) {
  double s2 = 0.0;
  for (const auto& p : ens.particles) {
    const double w = std::exp(p.log_weight);
    s2 += w * w;
  }
  return 1.0 / s2;
}

double history_log_likelihood(const ParticleEnsemble& ens, const CMatrix& chi) {
  double ll = 0.0;
  for (const auto& blk : ens.history) {
    ll += block_log_likelihood(blk, chi, ens.calibration);
    if (ll == kNegInf) break;
  }
  return ll;
}

ResampleStats resample(ParticleEnsemble& ens, Rng& rng, const ResampleOptions& opt) {
  const int s_total = static_cast<int>(ens.particles.size());
  const double sigma = opt.scale_c * std::sqrt(std::max(distribution_size(ens), 0.0));

  // Multinomial selection proportional to weights.
  std::vector<double> weights(s_total);
  for (int s = 0; s < s_total; ++s) weights[s] = std::exp(ens.particles[s].log_weight);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::vector<Particle> selected;
  selected.reserve(s_total);
  const double lw = -std::log(static_cast<double>(s_total));
  for (int s = 0; s < s_total; ++s) {
    Particle p = ens.particles[pick(rng)];
    p.log_weight = lw;
    selected.push_back(std::move(p));
  }
  ens.particles = std::move(selected);

  ResampleStats stats;
  stats.proposal_sigma = sigma;
  if (ens.history.empty() || opt.mh_steps <= 0) return stats;

  // Metropolis-Hastings walk: perturb the dilation, re-orthonormalize, accept
  // on the full-history likelihood ratio.
  const int rows = static_cast<int>(ens.particles.front().dilation.rows());
  long accepted = 0;
  for (auto& p : ens.particles) {
    double ll = history_log_likelihood(ens, p.chi);
    for (int step = 0; step < opt.mh_steps; ++step) {
      const CMatrix du = sigma * ginibre(rows, ens.dim, rng);
      CMatrix cand = p.dilation + du;
      Eigen::HouseholderQR<CMatrix> qr(cand);
      CMatrix q = qr.householderQ() * CMatrix::Identity(rows, ens.dim);
      const CMatrix r = qr.matrixQR().topRows(ens.dim).triangularView<Eigen::Upper>();
      for (int j = 0; j < ens.dim; ++j) {
        const Complex rjj = r(j, j);
        const double a = std::abs(rjj);
        if (a > 0) q.col(j) *= rjj / a;
      }
      CMatrix cand_chi = chi_from_dilation(q, ens.dim);
      const double cand_ll = history_log_likelihood(ens, cand_chi);
      const double log_u = std::log(uniform_real(rng, 0.0, 1.0));
      if (cand_ll - ll >= log_u) {
        p.dilation = std::move(q);
        p.chi = std::move(cand_chi);
        ll = cand_ll;
        ++accepted;
      }
    }
  }
  stats.acceptance =
      static_cast<double>(accepted) / (static_cast<double>(s_total) * opt.mh_steps);
  return stats;
}

}  // namespace aqpt
