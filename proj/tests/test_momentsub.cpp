#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mlr/errors.hpp"
#include "mlr/momentsub.hpp"
#include "mlr/oracle.hpp"

using namespace mlr;

namespace {

double spectral_norm(const MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXd random_spd_sqrt(int d, double lo, double hi, Rng& rng) {
  MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd Q = qr.householderQ();
  VectorXd eig(d);
  for (int i = 0; i < d; ++i) eig[i] = rng.uniform(lo, hi);
  return Q * eig.asDiagonal() * Q.transpose();
}

}  // namespace

TEST_SUITE_BEGIN("momentsub");

TEST_CASE("double factorial base cases and guard") {
  CHECK(double_factorial(0) == 1.0);
  CHECK(double_factorial(1) == 1.0);
  CHECK(double_factorial(2) == 3.0);
  CHECK(double_factorial(3) == 15.0);
  CHECK_THROWS_AS(double_factorial(16), ParameterError);
  CHECK_THROWS_AS(double_factorial(-1), ParameterError);
}

TEST_CASE("zero labels leave only the constant coefficient") {
  Rng rng(101);
  const int d = 3;
  const double z = 1.7;
  auto spec = spec_from_centers(VectorXd::Constant(1, z), 0.05, 4.0);
  MatrixXd xs(50, d);
  for (int i = 0; i < 50; ++i) xs.row(i) = rng.normal_vector(d).transpose();
  Dataset data(xs, VectorXd::Zero(50));
  auto M = moment_matrix(data, spec);
  MatrixXd second = xs.transpose() * xs / 50.0;
  CHECK((M.mat - (-z) * second).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("hand-evaluated single row cancels exactly") {
  // coeffs [-1, 1]: omega = -1 + alpha^2, so alpha = 1 gives zero weight.
  auto spec = spec_from_centers(VectorXd::Constant(1, 1.0), 0.05, 4.0);
  MatrixXd xs(1, 2);
  xs << 1.0, 0.0;
  Dataset data(xs, VectorXd::Constant(1, 1.0));
  auto M = moment_matrix(data, spec);
  CHECK(M.mat.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("moment matrix is permutation invariant over rows") {
  Rng rng(102);
  auto model = make_random_model(2, 4, 1.5, 0.4, rng);
  auto data = sample_dataset(model, 500, rng).stripped();
  VectorXd r(2);
  r << 0.5, 1.5;
  auto spec = make_spec(r, 0.05, 4.0);
  auto M1 = moment_matrix(data, spec);

  std::vector<std::size_t> perm(500);
  for (std::size_t i = 0; i < 500; ++i) perm[i] = 499 - i;
  auto M2 = moment_matrix(data.subset(perm), spec);
  double scale = std::max(1.0, M1.mat.cwiseAbs().maxCoeff());
  CHECK((M1.mat - M2.mat).cwiseAbs().maxCoeff() <= 1e-9 * scale);
}

TEST_CASE("moment matrix is symmetric and flags absurd labels") {
  auto spec = spec_from_centers(VectorXd::Constant(2, 1.0), 0.05, 4.0);
  MatrixXd xs(2, 2);
  xs << 1.0, 0.5, -0.25, 2.0;
  VectorXd alphas(2);
  alphas << 1e200, 1.0;
  Dataset data(xs, alphas);
  auto M = moment_matrix(data, spec);
  CHECK(M.clipped_rows == 1);
  CHECK(M.mat.allFinite());
  CHECK((M.mat - M.mat.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed-form population moment at hand points") {
  const MatrixXd I3 = MatrixXd::Identity(3, 3);
  SUBCASE("p = 1, unit direction") {
    MatrixXd M = population_moment(I3, VectorXd::Unit(3, 0), 1);
    MatrixXd expected = I3;
    expected(0, 0) = 3.0;
    CHECK((M - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("p = 0 returns the squared covariance factor") {
    Rng rng(7);
    MatrixXd S = random_spd_sqrt(3, 1.0, 2.0, rng);
    MatrixXd M = population_moment(S, VectorXd::Unit(3, 1), 0);
    CHECK((M - S * S).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("scaling the direction scales the moment") {
    MatrixXd M = population_moment(I3, 2.0 * VectorXd::Unit(3, 0), 1);
    MatrixXd expected = 4.0 * I3;
    expected(0, 0) = 12.0;  // 4 * (2 e1 e1^T + I)
    CHECK((M - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("zero direction with positive p is the zero matrix") {
    MatrixXd M = population_moment(I3, VectorXd::Zero(3), 2);
    CHECK(M.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("population moment agrees with Monte Carlo") {
  Rng rng(103);
  const int d = 3;
  MatrixXd S = random_spd_sqrt(d, 1.0, 2.0, rng);
  VectorXd v = rng.normal_vector(d).normalized();
  for (int p = 1; p <= 2; ++p) {
    MatrixXd closed = population_moment(S, v, p);
    Rng mc_rng(200 + p);
    auto res = mc_expectation_matrix(
        [&](const VectorXd& g) {
          VectorXd z = S * g;
          return MatrixXd(std::pow(z.dot(v), 2 * p) * z * z.transpose());
        },
        d, 1000000, mc_rng);
    double scale = spectral_norm(closed);
    CHECK(spectral_norm(res.estimate - closed) <= 0.02 * scale);
  }
}

TEST_CASE("population mixture moment reduces correctly at a = w") {
  Rng rng(104);
  const int d = 4;
  MatrixXd S = random_spd_sqrt(d, 1.0, 1.6, rng);
  VectorXd w = rng.normal_vector(d).normalized() * 0.8;
  MixtureModel model(VectorXd::Constant(1, 1.0), {w}, {S}, 1.6);
  VectorXd r(1);
  r << 0.9;
  auto spec = make_spec(r, 0.05, 4.0);
  MatrixXd M = population_moment_mix(model, w, spec);
  double f0 = eval_f(spec, 0.0).f;
  CHECK((M - f0 * S * S).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("empirical moment matrix converges to its population value") {
  SUBCASE("single component, strong signal: within 2 percent") {
    Rng rng(105);
    const int d = 4;
    VectorXd w = rng.normal_vector(d).normalized() * 0.8;
    MixtureModel model(VectorXd::Constant(1, 1.0), {w},
                       {MatrixXd::Identity(d, d)});
    VectorXd r = VectorXd::Constant(1, w.squaredNorm());
    auto spec = make_spec(r, 0.05, 4.0);
    auto data = sample_dataset(model, 500000, rng).stripped();
    auto M = moment_matrix(data, spec);
    MatrixXd pop = population_moment_mix(model, VectorXd::Zero(d), spec);
    CHECK(spectral_norm(M.mat - pop) <= 0.02 * spectral_norm(pop));
  }
  SUBCASE("two components: within the sampling-noise envelope") {
    Rng rng(115);
    const int d = 4;
    auto model = make_random_model(2, d, 1.4, 0.5, rng);
    VectorXd a = 0.3 * rng.normal_vector(d);

    VectorXd r(2);
    for (int i = 0; i < 2; ++i)
      r[i] = (model.cov_sqrts[i] * (model.weights[i] - a)).squaredNorm();
    double rho = 2.0 * std::max({r.maxCoeff(), 1.0 / r.minCoeff(), 1.0});
    auto spec = make_spec(r, 0.05, rho);

    const std::size_t m = 500000;
    auto data = residualize(sample_dataset(model, m, rng).stripped(), a);
    auto M = moment_matrix(data, spec);
    MatrixXd pop = population_moment_mix(model, a, spec);

    // Entrywise standard errors of the averaged row terms, aggregated in
    // Frobenius norm, bound the spectral deviation.
    VectorXd scaled(spec.coeffs.size());
    for (Eigen::Index p = 0; p < spec.coeffs.size(); ++p)
      scaled[p] = spec.coeffs[p] / double_factorial(static_cast<int>(p));
    MatrixXd sumsq = MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      double a2 = data.alphas()[i] * data.alphas()[i];
      double omega = 0.0;
      for (Eigen::Index p = scaled.size() - 1; p >= 0; --p)
        omega = omega * a2 + scaled[p];
      VectorXd x = data.xs().row(i).transpose();
      MatrixXd term = omega * x * x.transpose();
      sumsq += term.cwiseProduct(term);
    }
    MatrixXd var = sumsq / double(m) - (M.mat).cwiseProduct(M.mat);
    double se_frob = std::sqrt(var.cwiseMax(0.0).sum() / double(m));
    CHECK(spectral_norm(M.mat - pop) <=
          std::max(0.02 * spectral_norm(pop), 3.0 * se_frob));
  }
}

TEST_CASE("top-k subspace selection follows absolute eigenvalues") {
  SUBCASE("diagonal example") {
    VectorXd diag(4);
    diag << 5.0, 3.0, 1.0, 0.0;
    auto U = top_k_subspace(MatrixXd(diag.asDiagonal()), 2);
    // span{e1, e2}: projector reproduces both axes
    MatrixXd P = U.basis * U.basis.transpose();
    CHECK((P * VectorXd::Unit(4, 0) - VectorXd::Unit(4, 0)).norm() <= 1e-12);
    CHECK((P * VectorXd::Unit(4, 1) - VectorXd::Unit(4, 1)).norm() <= 1e-12);
    CHECK(U.abs_eigenvalues[0] == doctest::Approx(5.0));
  }
  SUBCASE("negative eigenvalue dominates by magnitude") {
    MatrixXd M = MatrixXd::Zero(3, 3);
    M(0, 0) = -4.0;
    M(1, 1) = 1.0;
    auto U = top_k_subspace(M, 1);
    CHECK(std::abs(U.basis.col(0).dot(VectorXd::Unit(3, 0))) ==
          doctest::Approx(1.0));
    CHECK(U.abs_eigenvalues[0] == doctest::Approx(4.0));
  }
  SUBCASE("orthonormality and reconstruction optimality") {
    Rng rng(106);
    for (int trial = 0; trial < 10; ++trial) {
      int d = 5 + int(rng.index(4));
      MatrixXd A(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = rng.normal();
      MatrixXd M = 0.5 * (A + A.transpose());
      int k = 1 + int(rng.index(d - 1));
      auto U = top_k_subspace(M, k);
      MatrixXd gram = U.basis.transpose() * U.basis;
      CHECK((gram - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-9);

      MatrixXd recon =
          U.basis * (U.basis.transpose() * M * U.basis) * U.basis.transpose();
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
      VectorXd abs_ev = es.eigenvalues().cwiseAbs();
      std::sort(abs_ev.data(), abs_ev.data() + d, std::greater<double>());
      double expected = k < d ? abs_ev[k] : 0.0;
      CHECK(spectral_norm(M - recon) == doctest::Approx(expected).epsilon(1e-8));
    }
  }
  SUBCASE("k larger than the dimension is rejected") {
    CHECK_THROWS_AS(top_k_subspace(MatrixXd::Identity(2, 2), 3),
                    ParameterError);
  }
}

TEST_CASE("rank-one perturbation keeps the designated direction") {
  Rng rng(107);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 6 + int(rng.index(8));
    int k = 1 + int(rng.index(5));
    double eps = (trial % 2 == 0) ? 1e-3 : 1e-2;

    std::vector<VectorXd> xs;
    MatrixXd sum = MatrixXd::Zero(d, d);
    for (int i = 0; i < k; ++i) {
      VectorXd x = rng.normal_vector(d);
      x *= rng.uniform(0.5, 2.0) / x.norm();
      xs.push_back(x);
      sum += x * x.transpose();
    }
    MatrixXd noise = random_spd_sqrt(d, 0.2, 1.0, rng);
    noise *= eps * xs[0].squaredNorm() / spectral_norm(noise);
    auto U = top_k_subspace(MatrixXd(sum + noise), k);
    double kept = (U.basis.transpose() * xs[0]).norm();
    CHECK(kept >= (1.0 - std::cbrt(eps * k)) * xs[0].norm());
  }
}

TEST_CASE("powerw recovers the signal direction end to end") {
  SUBCASE("single component, identity covariance") {
    Rng rng(108);
    VectorXd w = rng.normal_vector(5).normalized();
    MixtureModel model(VectorXd::Constant(1, 1.0), {w},
                       {MatrixXd::Identity(5, 5)});
    auto data = sample_dataset(model, 200000, rng).stripped();
    PowerwTolerances tol;
    auto U = powerw(data, 1, tol, rng);
    CHECK(std::abs(U.basis.col(0).dot(w)) >= 0.95);
  }
  SUBCASE("two orthogonal components, identity covariance") {
    Rng rng(109);
    VectorXd w1 = VectorXd::Unit(6, 0) * 0.9;
    VectorXd w2 = VectorXd::Unit(6, 1) * 0.5;
    std::vector<MatrixXd> covs(2, MatrixXd::Identity(6, 6));
    MixtureModel model(VectorXd::Constant(2, 0.5), {w1, w2}, covs);
    auto data = sample_dataset(model, 500000, rng).stripped();
    PowerwTolerances tol;
    auto U = powerw(data, 2, tol, rng);
    CHECK((U.basis.transpose() * w1).norm() / w1.norm() >= 0.9);
    CHECK((U.basis.transpose() * w2).norm() / w2.norm() >= 0.9);
  }
  SUBCASE("population-exact input satisfies the correlation bound") {
    Rng rng(110);
    for (int trial = 0; trial < 10; ++trial) {
      auto model = make_random_model(2 + int(rng.index(2)), 6, 1.5, 0.4, rng);
      VectorXd a = VectorXd::Zero(6);
      VectorXd r(model.k);
      for (int i = 0; i < model.k; ++i)
        r[i] = (model.cov_sqrts[i] * model.weights[i]).squaredNorm();
      double rho = 2.0 * std::max({r.maxCoeff(), 1.0 / r.minCoeff(), 1.0});
      auto spec = make_spec(r, 0.05, rho);
      MatrixXd pop = population_moment_mix(model, a, spec);
      auto U = top_k_subspace(pop, model.k);

      int j = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < model.k; ++i) {
        double s = (model.cov_sqrts[i] * model.weights[i]).norm();
        if (s < best) {
          best = s;
          j = i;
        }
      }
      VectorXd target = model.cov_sqrts[j] * model.cov_sqrts[j] *
                        (model.weights[j] - a);
      CHECK((U.basis.transpose() * target).norm() / target.norm() >= 0.5);
    }
  }
}

TEST_SUITE_END();
