#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mlr/rng.hpp"

namespace mlr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Ground-truth generative parameters of a k-component mixture of linear
// regressions. Component i is drawn with probability probs[i], the covariate
// is x = cov_sqrts[i] * g with g standard normal (so x has covariance
// cov_sqrts[i]^2), and the label is <weights[i], x>.
struct MixtureModel {
  int k = 0;
  int d = 0;
  VectorXd probs;
  std::vector<VectorXd> weights;
  std::vector<MatrixXd> cov_sqrts;

  // Declared bounds. Model files carry them and the learner consumes them;
  // zero delta/pmin means "derive from the parameters".
  double sigma = 1.0;
  double delta = 0.0;
  double pmin = 0.0;

  MixtureModel() = default;
  MixtureModel(VectorXd probs_in, std::vector<VectorXd> weights_in,
               std::vector<MatrixXd> cov_sqrts_in, double sigma_in = 1.0,
               double delta_in = 0.0, double pmin_in = 0.0);

  // Throws if shapes are inconsistent or probs is not a simplex vector
  // (sum within 1e-12 of 1, entries nonnegative).
  void check_shapes() const;

  double min_pairwise_weight_distance() const;
};

struct AssumptionCheck {
  bool pass = true;
  bool enforced = true;
  double value = 0.0;  // the violating (or measured) quantity
  double bound = 0.0;
};

struct ValidationReport {
  AssumptionCheck a1_min_eig;   // smallest eigenvalue over all cov sqrts vs 1
  AssumptionCheck a1_max_eig;   // largest eigenvalue vs sigma
  AssumptionCheck a2_min_prob;  // min prob vs pmin
  AssumptionCheck a3_min_sep;   // min pairwise weight distance vs delta
  AssumptionCheck a3_max_norm;  // max weight norm vs 1
  bool all_pass() const;
  std::string summary() const;
};

// Checks the model against the declared bounds. strict_a1 / strict_a3 turn
// the respective checks into hard pass/fail; when off the quantities are
// still measured but reported as passing.
ValidationReport validate(const MixtureModel& model, double sigma,
                          double delta, double pmin, bool strict_a1 = true,
                          bool strict_a3 = true);

// Labeled sample set. hidden_z records the generating component per row for
// evaluation code only; learn_all refuses datasets that still carry it.
class Dataset {
 public:
  Dataset() = default;
  Dataset(MatrixXd xs, VectorXd alphas);
  Dataset(MatrixXd xs, VectorXd alphas, std::vector<int> hidden_z);

  Eigen::Index n() const { return xs_.rows(); }
  Eigen::Index dim() const { return xs_.cols(); }
  const MatrixXd& xs() const { return xs_; }
  const VectorXd& alphas() const { return alphas_; }
  bool has_hidden() const { return !hidden_z_.empty(); }
  const std::vector<int>& hidden_z() const { return hidden_z_; }

  void set_alphas(VectorXd alphas);

  Dataset stripped() const;  // same rows without hidden_z
  Dataset subset(const std::vector<std::size_t>& rows) const;

 private:
  MatrixXd xs_;      // n x d
  VectorXd alphas_;  // n
  std::vector<int> hidden_z_;  // empty, or one component id per row
};

// Draws n i.i.d. rows from the model. Labels are exact inner products;
// label_noise adds N(0, label_noise^2) and defaults to 0.
Dataset sample_dataset(const MixtureModel& model, std::size_t n, Rng& rng,
                       double label_noise = 0.0);

// Replaces each label alpha by alpha - <a, x>.
Dataset residualize(const Dataset& data, const VectorXd& a);

// Random instance generator used by the CLI: uniform mixing proportions,
// diagonal covariance square roots with entries in [1, sigma], and weights
// rejected until every pair is at least delta apart (norms <= 1).
MixtureModel make_random_model(int k, int d, double sigma, double delta,
                               Rng& rng);

}  // namespace mlr
