#include "mlr/momentdescent.hpp"

#include <cmath>
#include <limits>

#include "mlr/errors.hpp"

namespace mlr {

int MomentDescentConfig::resolved_T() const {
  if (T > 0) return T;
  return static_cast<int>(
      std::ceil(200.0 * k * sigma * std::log(std::max(sigma / eps, 2.0))));
}

int MomentDescentConfig::resolved_q() const {
  if (q > 0) return q;
  return static_cast<int>(
      std::ceil(8.0 * std::log(std::max(k * sigma / (eps * delta), 2.0))));
}

double MomentDescentConfig::resolved_accept_factor() const {
  if (accept_factor > 0) return accept_factor;
  return 1.0 - 1.0 / (150.0 * k * sigma);
}

double MomentDescentConfig::resolved_variance_floor() const {
  return std::max(1e-8, (eps * sigma) * (eps * sigma) / 4.0);
}

VectorXd propose_direction(const SubspaceEstimate& U, Rng& rng) {
  const Eigen::Index k = U.basis.cols();
  for (int attempt = 0; attempt < 64; ++attempt) {
    VectorXd gamma = rng.normal_vector(k);
    VectorXd dir = U.basis * gamma;
    double nrm = dir.norm();
    if (nrm > 1e-12) return dir / nrm;
  }
  throw InternalError("propose_direction: degenerate subspace basis");
}

namespace {

struct ScaleEstimate {
  double sigma_sq;
  OneDEstimate est;
};

ScaleEstimate estimate_scale(const Dataset& batch, const VectorXd& a,
                             const MomentDescentConfig& cfg,
                             const OneDConfig& onedcfg, double cutoff,
                             Rng& rng) {
  Dataset res = residualize(batch, a);
  ScaleEstimate out{0.0, estimate_variances(res.alphas(), cfg.k, onedcfg, rng)};
  out.sigma_sq = min_variance(out.est, cutoff);
  return out;
}

}  // namespace

DescentState moment_descent(BatchSampler& sampler,
                            const MomentDescentConfig& cfg, Rng& rng) {
  if (cfg.k < 1) throw ParameterError("moment_descent: k must be >= 1");
  if (cfg.sigma < 1.0)
    throw ParameterError("moment_descent: sigma must be >= 1");
  if (cfg.eps <= 0.0) throw ParameterError("moment_descent: eps must be > 0");
  if (cfg.m < 2) throw ParameterError("moment_descent: batch size too small");

  const int T = cfg.resolved_T();
  const int q = cfg.resolved_q();
  const double accept = cfg.resolved_accept_factor();
  const double cutoff =
      cfg.powerw_tol.weight_cutoff > 0 ? cfg.powerw_tol.weight_cutoff
                                       : cfg.pmin / 2.0;
  OneDConfig onedcfg = cfg.powerw_tol.onedvar;
  onedcfg.variance_floor =
      std::max(onedcfg.variance_floor, cfg.resolved_variance_floor());
  PowerwTolerances ptol = cfg.powerw_tol;
  ptol.onedvar = onedcfg;

  const Eigen::Index d = sampler.dim();
  DescentState st;
  st.a = VectorXd::Zero(d);
  st.accept_factor = accept;

  VectorXd best_a = st.a;
  double best_sigma_sq = std::numeric_limits<double>::infinity();
  int consecutive_stalls = 0;
  double current_sigma_sq = std::numeric_limits<double>::quiet_NaN();

  for (int t = 0; t < T; ++t) {
    st.iter = t;
    Dataset batch = sampler.draw(cfg.m, rng);
    Dataset res = residualize(batch, st.a);
    OneDEstimate est =
        estimate_variances(res.alphas(), cfg.k, onedcfg, rng);
    double sigma_sq = min_variance(est, cutoff);
    current_sigma_sq = sigma_sq;

    DescentIterRecord rec;
    rec.iter = t;
    rec.sigma_sq = sigma_sq;

    if (sigma_sq < best_sigma_sq) {
      best_sigma_sq = sigma_sq;
      best_a = st.a;
    }
    if (std::sqrt(sigma_sq) <= cfg.eps * cfg.sigma) {
      st.trace.push_back(rec);
      st.reached_target = true;
      break;
    }

    SubspaceEstimate U = powerw(res, cfg.k, est, ptol);
    const double sigma_t = std::sqrt(sigma_sq);
    const double eta =
        cfg.eta_scale * sigma_t / (cfg.sigma * std::sqrt(double(cfg.k)));
    rec.eta = eta;

    bool accepted = false;
    for (int j = 0; j < q; ++j) {
      rec.trials = j + 1;
      VectorXd v = propose_direction(U, rng);
      VectorXd cand = st.a + eta * v;
      Dataset batch2 = sampler.draw(cfg.m, rng);
      // Differential acceptance: current iterate and candidate share the
      // batch and the estimator's restart stream, so their common sampling
      // noise cancels in the comparison.
      std::uint64_t trial_stream = rng.next_u64();
      Rng em_base = rng.substream(trial_stream);
      Rng em_cand = rng.substream(trial_stream);
      ScaleEstimate base_scale =
          estimate_scale(batch2, st.a, cfg, onedcfg, cutoff, em_base);
      ScaleEstimate cand_scale =
          estimate_scale(batch2, cand, cfg, onedcfg, cutoff, em_cand);
      if (cand_scale.sigma_sq <= accept * base_scale.sigma_sq) {
        st.a = cand;
        current_sigma_sq = cand_scale.sigma_sq;
        rec.accepted = true;
        rec.baseline_sq = base_scale.sigma_sq;
        rec.sigma_prime_sq = cand_scale.sigma_sq;
        accepted = true;
        break;
      }
    }

    if (accepted) {
      consecutive_stalls = 0;
      if (current_sigma_sq < best_sigma_sq) {
        best_sigma_sq = current_sigma_sq;
        best_a = st.a;
      }
    } else {
      rec.stalled = true;
      ++consecutive_stalls;
      ++st.stalls_total;
    }
    st.trace.push_back(rec);

    if (consecutive_stalls >= cfg.max_consecutive_stalls) {
      st.a = best_a;
      current_sigma_sq = best_sigma_sq;
      break;
    }
  }

  st.sigma_t = std::sqrt(current_sigma_sq);
  return st;
}

bool accepted_step_contract(const std::vector<DescentIterRecord>& trace,
                            double accept_factor) {
  for (const auto& rec : trace) {
    if (!rec.accepted) continue;
    if (rec.sigma_prime_sq > accept_factor * rec.baseline_sq * (1.0 + 1e-12))
      return false;
  }
  return true;
}

bool accepted_step_contract(const DescentState& state) {
  return accepted_step_contract(state.trace, state.accept_factor);
}

}  // namespace mlr
