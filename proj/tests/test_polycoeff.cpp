#include <doctest.h>

#include <cmath>

#include "mlr/errors.hpp"
#include "mlr/polycoeff.hpp"
#include "mlr/rng.hpp"

using namespace mlr;

TEST_SUITE_BEGIN("polycoeff");

TEST_CASE("clustering keeps the minimum and the tail above the gap") {
  VectorXd r(3);
  r << 0.5, 1.0, 2.0;
  auto cl = cluster_centers(r, 0.1, 4.0);
  REQUIRE(cl.centers.size() == 3);
  CHECK(cl.centers[0] == doctest::Approx(0.5));
  CHECK(cl.centers[1] == doctest::Approx(1.0));
  CHECK(cl.centers[2] == doctest::Approx(2.0));
  CHECK_FALSE(cl.clamped);
}

TEST_CASE("clustering collapses a tight bundle to a single center") {
  VectorXd r(3);
  r << 1.0, 1.01, 1.02;
  auto cl = cluster_centers(r, 0.1, 2.0);
  REQUIRE(cl.centers.size() == 1);
  CHECK(cl.centers[0] == doctest::Approx(1.0));

  VectorXd same = VectorXd::Constant(4, 1.7);
  auto single = cluster_centers(same, 0.05, 3.0);
  CHECK(single.centers.size() == 1);
  CHECK(single.centers[0] == doctest::Approx(1.7));
}

TEST_CASE("out-of-range inputs are clamped and flagged") {
  VectorXd r(2);
  r << 0.01, 5.0;
  auto cl = cluster_centers(r, 0.05, 4.0);
  CHECK(cl.clamped);
  CHECK(cl.centers.minCoeff() >= 1.0 / 4.0 - 1e-12);
  CHECK(cl.centers.maxCoeff() <= 4.0 + 1e-12);
  CHECK_THROWS_AS(cluster_centers(r, -1.0, 4.0), ParameterError);
  CHECK_THROWS_AS(cluster_centers(r, 0.1, 0.9), ParameterError);
}

TEST_CASE("coefficient expansion of small products") {
  VectorXd one(1);
  one << 1.0;
  VectorXd c1 = poly_coeffs(one);
  REQUIRE(c1.size() == 2);
  CHECK(c1[0] == doctest::Approx(-1.0));
  CHECK(c1[1] == doctest::Approx(1.0));

  VectorXd two(2);
  two << 1.0, 2.0;
  VectorXd c2 = poly_coeffs(two);
  REQUIRE(c2.size() == 3);
  CHECK(c2[0] == doctest::Approx(2.0));
  CHECK(c2[1] == doctest::Approx(-3.0));
  CHECK(c2[2] == doctest::Approx(1.0));
}

TEST_CASE("centers are roots by construction") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    double z = rng.uniform(0.3, 5.0);
    auto spec = spec_from_centers(VectorXd::Constant(1, z), 0.05, 10.0);
    CHECK(std::abs(eval_f(spec, std::sqrt(z)).f) <= 1e-12 * std::max(1.0, z));
  }
}

TEST_CASE("derivatives at a hand-checked point") {
  auto spec = spec_from_centers(VectorXd::Constant(1, 1.0), 0.05, 4.0);
  double x = std::sqrt(2.0);
  auto e = eval_f(spec, x);
  CHECK(e.f == doctest::Approx(1.0));
  CHECK(e.df == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(e.ddf == doctest::Approx(2.0));
  CHECK_THROWS_AS(eval_f(spec, -0.1), ParameterError);
}

TEST_CASE("derivatives agree with central finite differences") {
  Rng rng(18);
  for (int trial = 0; trial < 30; ++trial) {
    int s = 1 + int(rng.index(4));
    VectorXd centers(s);
    for (int i = 0; i < s; ++i) centers[i] = rng.uniform(0.5, 4.0);
    auto spec = spec_from_centers(centers, 0.05, 8.0);
    double x = rng.uniform(0.3, 2.2);
    auto e = eval_f(spec, x);
    const double h = 1e-5;
    double fd1 = (eval_f(spec, x + h).f - eval_f(spec, x - h).f) / (2 * h);
    double fd2 = (eval_f(spec, x + h).df - eval_f(spec, x - h).df) / (2 * h);
    double scale1 = std::max(std::abs(e.df), 1e-2);
    double scale2 = std::max(std::abs(e.ddf), 1e-2);
    CHECK(std::abs(fd1 - e.df) <= 1e-4 * scale1);
    CHECK(std::abs(fd2 - e.ddf) <= 1e-4 * scale2);
  }
}

TEST_CASE("coefficient evaluation matches the product form") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    int k = 2 + int(rng.index(6));
    double rho = rng.uniform(2.0, 20.0);
    VectorXd r(k);
    for (int i = 0; i < k; ++i) r[i] = rng.uniform(1.0 / rho, rho);
    auto spec = make_spec(r, 0.05, rho);
    for (int pt = 0; pt < 100; ++pt) {
      double x = rng.uniform(0.0, std::sqrt(rho));
      double via_prod = eval_f(spec, x).f;
      double via_coeff = eval_f_coeffs(spec, x);
      // Near roots both routes cancel, so measure against the evaluation's
      // condition scale sum |c_i| x^(2i).
      double scale = 1e-12, term = 1.0;
      for (Eigen::Index i = 0; i < spec.coeffs.size(); ++i) {
        scale += std::abs(spec.coeffs[i]) * term;
        term *= x * x;
      }
      CHECK(std::abs(via_prod - via_coeff) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("coefficient-lemma properties hold on random instances") {
  Rng rng(20);
  for (int trial = 0; trial < 50; ++trial) {
    int k = 2 + int(rng.index(7));
    double rho = rng.uniform(2.0, 50.0);
    double eps = (trial % 2 == 0) ? 0.05 : 0.1;
    VectorXd r(k);
    for (int i = 0; i < k; ++i) r[i] = rng.uniform(1.0 / rho, rho);
    auto spec = make_spec(r, eps, rho);

    double rmin = r.minCoeff();
    double base = std::abs(std::sqrt(rmin) * eval_f(spec, std::sqrt(rmin)).df);
    for (int i = 0; i < k; ++i) {
      double fi = std::abs(eval_f(spec, std::sqrt(r[i])).f);
      CHECK(fi <= eps * base + 1e-9 * std::max(1.0, base));
    }
    CHECK(base >= std::pow(eps / rho, k) - 1e-9);

    double bound1 = 2.0 * k * std::pow(rho, k);
    double bound2 = 4.0 * k * k * std::pow(rho, k);
    for (int g = 0; g < 200; ++g) {
      double u = 1.0 / rho + (rho - 1.0 / rho) * g / 199.0;
      auto e = eval_f(spec, std::sqrt(u));
      CHECK(std::abs(e.df) <= bound1 * (1 + 1e-9));
      CHECK(std::abs(e.ddf) <= bound2 * (1 + 1e-9));
    }
  }
}

TEST_SUITE_END();
