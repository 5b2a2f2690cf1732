#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlr/graddescent.hpp"
#include "mlr/momentdescent.hpp"

namespace mlr {

struct LearnerConfig {
  int k = 1;
  double eps = 0.05;        // final target error
  double sigma = 1.0;
  double delta_sep = 1.0;
  double pmin = 1.0;
  double delta_fail = 0.1;  // failure probability budget

  double eps_w = 0;          // 0 -> pmin * delta / (2 sigma)
  double eps_g = 0;          // 0 -> max(min(eps, (pmin delta/(sigma d))^(k^2/2)), 1e-9)
  double removal_scale = 3;  // C in threshold eps_g * sigma * C * log(d)

  MomentDescentConfig md;
  GradConfig gd;

  // Fills every dependent field from the model bounds. delta falls back to 1
  // for single-component instances, where separation is vacuous.
  static LearnerConfig defaults(int k, int d, double sigma, double delta,
                                double pmin, double eps);

  double resolved_eps_w() const;
  double resolved_eps_g(int d) const;
  double removal_threshold(int d) const;
};

struct RoundReport {
  VectorXd v;
  DescentState descent;
  RefineResult refinement;
  double threshold = 0.0;
  std::size_t removed_count = 0;
  std::vector<std::size_t> removed_indices;  // positions in the input dataset
  double seconds_descent = 0.0;
  double seconds_refine = 0.0;
};

struct FitReport {
  std::vector<VectorXd> recovered;
  std::vector<RoundReport> rounds;
  std::uint64_t seed = 0;
  int k = 0;
  int d = 0;
  std::string status = "ok";  // "ok" or "partial"
  std::size_t samples_consumed = 0;
  double total_seconds = 0.0;

  // Filled by evaluation against ground truth (optional).
  bool evaluated = false;
  std::vector<int> permutation;
  std::vector<double> matched_errors;
  double max_error = 0.0;
};

// Thrown when the dataset runs out mid-peel; carries what was recovered.
class InsufficientDataError : public ResourceError {
 public:
  InsufficientDataError(const std::string& msg, FitReport partial)
      : ResourceError(msg), partial_(std::move(partial)) {}
  const FitReport& partial() const { return partial_; }

 private:
  FitReport partial_;
};

struct RemovalResult {
  Dataset kept;
  std::vector<std::size_t> removed_indices;  // positions in the input, ascending
  std::size_t removed_count() const { return removed_indices.size(); }
};

// Keeps rows with |<x, v> - alpha| > threshold, order preserved.
RemovalResult remove_explained(const Dataset& data, const VectorXd& v,
                               double threshold);

// Alternates warm start, refinement, and removal of explained rows, passing
// k-i+1 components to the inner stages on round i. Rejects datasets that
// still carry hidden component ids.
FitReport learn_all(const Dataset& data, const LearnerConfig& cfg, Rng& rng);

struct RecoveryError {
  std::vector<int> permutation;       // estimate i matches truth[permutation[i]]
  double max_error = 0.0;
  std::vector<double> per_component;  // per estimate, under the permutation
};

// Brute force over all k! permutations, minimizing the maximum per-component
// l2 error. k is capped at 8; larger lists get a parameter error pointing to
// the greedy matcher.
RecoveryError recovery_error(const std::vector<VectorXd>& estimates,
                             const std::vector<VectorXd>& truth);

// Diagnostic-only matcher for k > 8: repeatedly pairs the globally closest
// estimate/truth pair. Not guaranteed optimal.
RecoveryError greedy_recovery_error(const std::vector<VectorXd>& estimates,
                                    const std::vector<VectorXd>& truth);

}  // namespace mlr
