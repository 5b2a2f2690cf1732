#pragma once

#include <vector>

#include "mlr/model.hpp"

namespace mlr {

struct OneDConfig {
  int restarts = 10;
  int max_iters = 200;
  double tol = 1e-7;              // relative log-likelihood change per step
  double variance_floor = 1e-8;   // must be > 0
};

// Variances of a mean-zero one-dimensional Gaussian mixture, sorted
// ascending, with the matching mixing weights.
struct OneDEstimate {
  VectorXd variances;
  VectorXd mix_weights;
  double loglik = 0.0;
  int restarts_used = 0;
  std::vector<double> loglik_trace;  // per-iteration objective of the winner
};

// EM over zero-mean Gaussians with multiple restarts. Restart 0 starts from
// variances log-spaced across [quantile(z^2, 0.05), quantile(z^2, 0.95)];
// later restarts draw log-uniform initializations from the same range. The
// best final log-likelihood wins, ties broken by lowest restart index.
OneDEstimate estimate_variances(const VectorXd& values, int k,
                                const OneDConfig& cfg, Rng& rng);

// Minimum variance among components with mixing weight >= weight_cutoff;
// falls back to the overall minimum when none qualifies.
double min_variance(const OneDEstimate& est, double weight_cutoff);

}  // namespace mlr
