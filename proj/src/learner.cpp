#include "mlr/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "mlr/errors.hpp"

namespace mlr {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

LearnerConfig LearnerConfig::defaults(int k, int d, double sigma, double delta,
                                      double pmin, double eps) {
  if (k < 1) throw ParameterError("learner: k must be >= 1");
  if (d < 1) throw ParameterError("learner: d must be >= 1");
  LearnerConfig cfg;
  cfg.k = k;
  cfg.eps = eps;
  cfg.sigma = sigma;
  cfg.delta_sep = (k >= 2 && delta > 0) ? delta : 1.0;
  cfg.pmin = pmin > 0 ? pmin : 1.0 / k;

  cfg.md.k = k;
  cfg.md.sigma = sigma;
  cfg.md.pmin = cfg.pmin;
  cfg.md.eps = cfg.resolved_eps_w() / sigma;

  cfg.gd.d = d;
  cfg.gd.sigma = sigma;
  cfg.gd.delta_sep = cfg.delta_sep;
  cfg.gd.pmin = cfg.pmin;
  cfg.gd.eps = cfg.resolved_eps_g(d);
  return cfg;
}

double LearnerConfig::resolved_eps_w() const {
  if (eps_w > 0) return eps_w;
  return pmin * delta_sep / (2.0 * sigma);
}

double LearnerConfig::resolved_eps_g(int d) const {
  if (eps_g > 0) return eps_g;
  double paper = std::pow(pmin * delta_sep / (sigma * d),
                          0.5 * double(k) * double(k));
  return std::max(std::min(eps, paper), 1e-9);
}

double LearnerConfig::removal_threshold(int d) const {
  return resolved_eps_g(d) * sigma * removal_scale *
         std::max(1.0, std::log(static_cast<double>(d)));
}

RemovalResult remove_explained(const Dataset& data, const VectorXd& v,
                               double threshold) {
  if (threshold < 0.0)
    throw ParameterError("remove_explained: threshold must be >= 0");
  if (v.size() != data.dim())
    throw ParameterError("remove_explained: dimension mismatch");

  VectorXd res = data.xs() * v - data.alphas();
  std::vector<std::size_t> keep, removed;
  keep.reserve(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (std::abs(res[i]) > threshold)
      keep.push_back(static_cast<std::size_t>(i));
    else
      removed.push_back(static_cast<std::size_t>(i));
  }
  return RemovalResult{data.subset(keep), std::move(removed)};
}

FitReport learn_all(const Dataset& data, const LearnerConfig& cfg, Rng& rng) {
  if (data.has_hidden())
    throw ParameterError(
        "learn_all: dataset carries hidden component ids; call stripped() "
        "first (they are for evaluation only)");
  if (data.n() == 0) throw DataError("learn_all: empty dataset");
  const int d = static_cast<int>(data.dim());
  const auto t_start = std::chrono::steady_clock::now();

  FitReport report;
  report.seed = rng.seed();
  report.k = cfg.k;
  report.d = d;

  Dataset remaining = data;
  std::vector<std::size_t> orig_idx(data.n());
  std::iota(orig_idx.begin(), orig_idx.end(), std::size_t{0});

  const double threshold = cfg.removal_threshold(d);

  for (int round = 0; round < cfg.k; ++round) {
    const std::size_t needed = std::max(cfg.md.m, cfg.gd.m);
    if (static_cast<std::size_t>(remaining.n()) < needed) {
      report.status = "partial";
      report.total_seconds = seconds_since(t_start);
      throw InsufficientDataError(
          "learn_all: only " + std::to_string(remaining.n()) +
              " rows left before round " + std::to_string(round + 1) +
              " but batches of " + std::to_string(needed) + " are required",
          report);
    }

    MomentDescentConfig md = cfg.md;
    md.k = cfg.k - round;
    GradConfig gd = cfg.gd;
    gd.d = d;

    DatasetSampler sampler(remaining);
    RoundReport rr;

    auto t0 = std::chrono::steady_clock::now();
    rr.descent = moment_descent(sampler, md, rng);
    rr.seconds_descent = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    rr.refinement = refine(sampler, rr.descent.a, gd, rng);
    rr.seconds_refine = seconds_since(t0);
    rr.v = rr.refinement.v;
    rr.threshold = threshold;

    RemovalResult rem = remove_explained(remaining, rr.v, threshold);
    rr.removed_count = rem.removed_count();
    rr.removed_indices.reserve(rem.removed_indices.size());
    for (std::size_t pos : rem.removed_indices)
      rr.removed_indices.push_back(orig_idx[pos]);

    // Keep the original-row bookkeeping aligned with the surviving rows.
    std::vector<std::size_t> next_idx;
    next_idx.reserve(orig_idx.size() - rem.removed_indices.size());
    std::size_t r = 0;
    for (std::size_t pos = 0; pos < orig_idx.size(); ++pos) {
      if (r < rem.removed_indices.size() && rem.removed_indices[r] == pos) {
        ++r;
        continue;
      }
      next_idx.push_back(orig_idx[pos]);
    }
    orig_idx = std::move(next_idx);

    report.samples_consumed += sampler.samples_drawn();
    report.recovered.push_back(rr.v);
    report.rounds.push_back(std::move(rr));
    remaining = rem.kept;
  }

  report.total_seconds = seconds_since(t_start);
  return report;
}

namespace {

RecoveryError match_with_order(const std::vector<VectorXd>& estimates,
                               const std::vector<VectorXd>& truth,
                               const std::vector<int>& perm) {
  RecoveryError out;
  out.permutation = perm;
  out.per_component.resize(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    out.per_component[i] = (estimates[i] - truth[perm[i]]).norm();
    out.max_error = std::max(out.max_error, out.per_component[i]);
  }
  return out;
}

}  // namespace

RecoveryError recovery_error(const std::vector<VectorXd>& estimates,
                             const std::vector<VectorXd>& truth) {
  if (estimates.size() != truth.size())
    throw ParameterError("recovery_error: list length mismatch");
  if (estimates.empty()) throw ParameterError("recovery_error: empty lists");
  const int k = static_cast<int>(estimates.size());
  if (k > 8)
    throw ParameterError(
        "recovery_error: k > 8; use greedy_recovery_error (diagnostic only)");

  MatrixXd dist(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      dist(i, j) = (estimates[i] - truth[j]).norm();

  std::vector<int> perm(k), best_perm;
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int i = 0; i < k; ++i) worst = std::max(worst, dist(i, perm[i]));
    if (worst < best) {
      best = worst;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  return match_with_order(estimates, truth, best_perm);
}

RecoveryError greedy_recovery_error(const std::vector<VectorXd>& estimates,
                                    const std::vector<VectorXd>& truth) {
  if (estimates.size() != truth.size())
    throw ParameterError("greedy_recovery_error: list length mismatch");
  if (estimates.empty())
    throw ParameterError("greedy_recovery_error: empty lists");
  const int k = static_cast<int>(estimates.size());

  std::vector<int> perm(k, -1);
  std::vector<bool> est_used(k, false), truth_used(k, false);
  for (int round = 0; round < k; ++round) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < k; ++i) {
      if (est_used[i]) continue;
      for (int j = 0; j < k; ++j) {
        if (truth_used[j]) continue;
        double dij = (estimates[i] - truth[j]).norm();
        if (dij < best) {
          best = dij;
          bi = i;
          bj = j;
        }
      }
    }
    perm[bi] = bj;
    est_used[bi] = true;
    truth_used[bj] = true;
  }
  return match_with_order(estimates, truth, perm);
}

}  // namespace mlr
