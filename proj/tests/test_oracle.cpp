#include <doctest.h>

#include <cmath>
#include <limits>

#include "mlr/errors.hpp"
#include "mlr/oracle.hpp"

using namespace mlr;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("constant integrand has zero standard error") {
  Rng rng(1);
  auto res = mc_expectation([](const VectorXd&) { return 1.0; }, 3, 1000, rng);
  CHECK(res.estimate(0, 0) == doctest::Approx(1.0));
  CHECK(res.std_error(0, 0) == doctest::Approx(0.0));
  CHECK(res.excluded == 0);
}

TEST_CASE("squared coordinate has unit mean") {
  Rng rng(2);
  auto res = mc_expectation([](const VectorXd& y) { return y[0] * y[0]; }, 3,
                            1000000, rng);
  CHECK(std::abs(res.estimate(0, 0) - 1.0) <= 3.0 * res.std_error(0, 0));
}

TEST_CASE("matrix moment matches the Gaussian closed form") {
  Rng rng(3);
  VectorXd w = VectorXd::Zero(3);
  w[0] = 0.6;
  w[2] = 0.8;  // unit vector
  auto res = mc_expectation_matrix(
      [&](const VectorXd& y) {
        double dot = w.dot(y);
        return MatrixXd(dot * dot * y * y.transpose());
      },
      3, 400000, rng);
  MatrixXd expected = 3.0 * w * w.transpose() +
                      (MatrixXd::Identity(3, 3) - w * w.transpose());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(res.estimate(i, j) - expected(i, j)) <=
            3.0 * res.std_error(i, j) + 1e-12);
}

TEST_CASE("standard errors shrink like the square root of the sample count") {
  auto f = [](const VectorXd& y) { return std::exp(0.3 * y[0]); };
  Rng r1(4), r2(4);
  auto small = mc_expectation(f, 1, 50000, r1);
  auto large = mc_expectation(f, 1, 200000, r2);
  double ratio = small.std_error(0, 0) / large.std_error(0, 0);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.20));
}

TEST_CASE("non-finite outputs are excluded and counted") {
  Rng rng(5);
  auto res = mc_expectation(
      [](const VectorXd& y) {
        return y[0] > 1.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
      },
      1, 10000, rng);
  CHECK(res.excluded > 0);
  CHECK(res.estimate(0, 0) == doctest::Approx(1.0));
  CHECK(res.n + res.excluded == 10000);
}

TEST_CASE("finite differences recover simple gradients") {
  VectorXd v(4);
  v << 0.3, -1.2, 0.0, 2.0;
  auto quad = [](const VectorXd& u) { return 0.5 * u.squaredNorm(); };
  VectorXd g = finite_diff_grad(quad, v, 1e-5);
  CHECK((g - v).cwiseAbs().maxCoeff() <= 1e-6);

  VectorXd c(4);
  c << 1.0, 2.0, -0.5, 0.25;
  auto lin = [&](const VectorXd& u) { return c.dot(u); };
  VectorXd gl = finite_diff_grad(lin, v, 1e-5);
  CHECK((gl - c).cwiseAbs().maxCoeff() <= 1e-9);

  CHECK_THROWS_AS(finite_diff_grad(quad, v, 0.0), ParameterError);
}

TEST_CASE("brute-force minimum scale and its tie-breaking") {
  Rng rng(6);
  auto model = make_random_model(2, 3, 1.0, 0.5, rng);
  SUBCASE("at a true weight the scale is zero") {
    auto [j, val] = brute_force_min_scale(model, model.weights[0]);
    CHECK(j == 0);
    CHECK(val == doctest::Approx(0.0));
  }
  SUBCASE("single component always picks index zero") {
    auto single = make_random_model(1, 3, 1.0, 0.0, rng);
    auto [j, val] = brute_force_min_scale(single, rng.normal_vector(3));
    CHECK(j == 0);
    CHECK(val >= 0.0);
  }
  SUBCASE("midpoint ties break to the lowest index") {
    std::vector<VectorXd> ws{VectorXd::Unit(2, 0), VectorXd::Unit(2, 1)};
    std::vector<MatrixXd> covs(2, MatrixXd::Identity(2, 2));
    MixtureModel m(VectorXd::Constant(2, 0.5), ws, covs);
    VectorXd mid = 0.5 * (ws[0] + ws[1]);
    auto [j, val] = brute_force_min_scale(m, mid);
    CHECK(j == 0);
    CHECK(val == doctest::Approx((ws[0] - ws[1]).norm() / 2.0));
  }
}

TEST_SUITE_END();
