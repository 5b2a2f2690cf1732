#include "mlr/oracle.hpp"

#include <cmath>
#include <limits>

#include "mlr/errors.hpp"

namespace mlr {

namespace {

OracleResult run_mc(const std::function<MatrixXd(const VectorXd&)>& f, int dim,
                    std::size_t n, Rng& rng) {
  if (dim < 1) throw ParameterError("mc_expectation: dim must be >= 1");
  if (n < 2) throw ParameterError("mc_expectation: n must be >= 2");

  MatrixXd sum, sumsq;
  bool first = true;
  std::size_t excluded = 0, valid = 0;
  VectorXd y(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) y[j] = rng.normal();
    MatrixXd value = f(y);
    if (first) {
      sum = MatrixXd::Zero(value.rows(), value.cols());
      sumsq = MatrixXd::Zero(value.rows(), value.cols());
      first = false;
    }
    if (!value.allFinite()) {
      ++excluded;
      continue;
    }
    sum += value;
    sumsq += value.cwiseProduct(value);
    ++valid;
  }
  if (valid < 2) throw DataError("mc_expectation: fewer than 2 finite samples");

  OracleResult out;
  out.n = valid;
  out.excluded = excluded;
  out.estimate = sum / static_cast<double>(valid);
  MatrixXd var =
      (sumsq - static_cast<double>(valid) *
                   out.estimate.cwiseProduct(out.estimate)) /
      static_cast<double>(valid - 1);
  out.std_error =
      var.cwiseMax(0.0).cwiseSqrt() / std::sqrt(static_cast<double>(valid));
  return out;
}

}  // namespace

OracleResult mc_expectation(const std::function<double(const VectorXd&)>& f,
                            int dim, std::size_t n, Rng& rng) {
  return run_mc(
      [&f](const VectorXd& y) {
        MatrixXd m(1, 1);
        m(0, 0) = f(y);
        return m;
      },
      dim, n, rng);
}

OracleResult mc_expectation_matrix(
    const std::function<MatrixXd(const VectorXd&)>& f, int dim, std::size_t n,
    Rng& rng) {
  return run_mc(f, dim, n, rng);
}

VectorXd finite_diff_grad(const std::function<double(const VectorXd&)>& obj,
                          const VectorXd& v, double h) {
  if (h <= 0.0) throw ParameterError("finite_diff_grad: h must be > 0");
  VectorXd g(v.size());
  VectorXd probe = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    probe[i] = v[i] + h;
    double up = obj(probe);
    probe[i] = v[i] - h;
    double down = obj(probe);
    probe[i] = v[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

std::pair<int, double> brute_force_min_scale(const MixtureModel& model,
                                             const VectorXd& a) {
  if (a.size() != model.d)
    throw ParameterError("brute_force_min_scale: dimension mismatch");
  int best_i = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.k; ++i) {
    double v = (model.cov_sqrts[i] * (model.weights[i] - a)).norm();
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  return {best_i, best};
}

}  // namespace mlr
