#pragma once

#include <vector>

#include "mlr/momentsub.hpp"
#include "mlr/sampler.hpp"

namespace mlr {

struct MomentDescentConfig {
  int k = 1;
  double sigma = 1.0;
  double pmin = 1.0;
  double eps = 0.05;    // target residual scale, in units of sigma
  double delta = 0.1;   // failure probability budget
  std::size_t m = 20000;

  int T = 0;                  // 0 -> ceil(200 k sigma ln(sigma/eps))
  int q = 0;                  // 0 -> ceil(8 ln(k sigma / (eps delta)))
  double eta_scale = 0.1;     // eta_t = eta_scale * sigma_t / (sigma sqrt(k))
  double accept_factor = 0;   // 0 -> 1 - 1/(150 k sigma)
  int max_consecutive_stalls = 3;

  PowerwTolerances powerw_tol;

  int resolved_T() const;
  int resolved_q() const;
  double resolved_accept_factor() const;
  // Near-point-mass residual components degenerate EM without a floor.
  double resolved_variance_floor() const;
};

struct DescentIterRecord {
  int iter = 0;
  double sigma_sq = 0.0;        // estimated sigma_t^2 for the current iterate
  double eta = 0.0;
  int trials = 0;               // directions tried this iteration
  bool accepted = false;
  double baseline_sq = 0.0;     // current iterate re-estimated on the
                                // accepting trial's batch
  double sigma_prime_sq = 0.0;  // accepted candidate's estimate (same batch)
  bool stalled = false;
};

struct DescentState {
  VectorXd a;
  double sigma_t = 0.0;
  int iter = 0;
  std::vector<DescentIterRecord> trace;
  bool reached_target = false;
  int stalls_total = 0;
  double accept_factor = 0.0;  // the threshold the run enforced
};

// Unit vector U gamma / |U gamma| with gamma standard normal in R^k.
VectorXd propose_direction(const SubspaceEstimate& U, Rng& rng);

// Iteratively shrinks the minimum residual scale min_i |Sigma_i (w_i - a_t)|
// by stepping along random directions of the estimated moment subspace,
// accepting a step only when the re-estimated scale drops below
// accept_factor * sigma_t^2. Each trial draws a fresh batch and estimates
// BOTH the current iterate and the candidate on it, so the acceptance
// comparison is differential and estimator noise largely cancels. Three
// consecutive stalls end the run early with the best iterate seen.
DescentState moment_descent(BatchSampler& sampler,
                            const MomentDescentConfig& cfg, Rng& rng);

// Audit: every accepted step in the trace satisfied the acceptance factor.
bool accepted_step_contract(const std::vector<DescentIterRecord>& trace,
                            double accept_factor);
bool accepted_step_contract(const DescentState& state);

}  // namespace mlr
