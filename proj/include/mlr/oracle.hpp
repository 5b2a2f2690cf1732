#pragma once

#include <functional>
#include <utility>

#include "mlr/model.hpp"

namespace mlr {

// Monte-Carlo estimate with per-entry standard errors. Scalar results are
// stored as 1x1 matrices.
struct OracleResult {
  MatrixXd estimate;
  MatrixXd std_error;
  std::size_t n = 0;
  std::size_t excluded = 0;  // samples with non-finite f output
};

// Sample mean and standard error of f(y), y standard normal in R^dim.
// Non-finite outputs are excluded and counted.
OracleResult mc_expectation(const std::function<double(const VectorXd&)>& f,
                            int dim, std::size_t n, Rng& rng);

OracleResult mc_expectation_matrix(
    const std::function<MatrixXd(const VectorXd&)>& f, int dim, std::size_t n,
    Rng& rng);

// Central differences per coordinate.
VectorXd finite_diff_grad(const std::function<double(const VectorXd&)>& obj,
                          const VectorXd& v, double h);

// Exact argmin index and value of |Sigma_i (w_i - a)| over the components,
// ties broken by lowest index. Test-only ground truth for sigma_t.
std::pair<int, double> brute_force_min_scale(const MixtureModel& model,
                                             const VectorXd& a);

}  // namespace mlr
