#include "mlr/polycoeff.hpp"

#include <algorithm>
#include <cmath>

#include "mlr/errors.hpp"

namespace mlr {

ClusterResult cluster_centers(const VectorXd& r, double eps, double rho) {
  if (r.size() == 0) throw ParameterError("cluster_centers: empty input");
  if (eps <= 0.0) throw ParameterError("cluster_centers: eps must be > 0");
  if (rho <= 1.0) throw ParameterError("cluster_centers: rho must be > 1");

  ClusterResult out;
  std::vector<double> v(r.data(), r.data() + r.size());
  for (double& x : v) {
    double clamped = std::clamp(x, 1.0 / rho, rho);
    if (clamped != x) out.clamped = true;
    x = clamped;
  }
  std::sort(v.begin(), v.end());

  const double z1 = v.front();
  std::size_t j = v.size();
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] >= z1 + eps / rho) {
      j = i;
      break;
    }
  }
  std::vector<double> centers{z1};
  for (std::size_t i = j; i < v.size(); ++i) centers.push_back(v[i]);

  out.centers = Eigen::Map<VectorXd>(centers.data(), centers.size());
  return out;
}

VectorXd poly_coeffs(const VectorXd& centers) {
  if (centers.size() == 0) throw ParameterError("poly_coeffs: empty centers");
  const Eigen::Index s = centers.size();
  VectorXd c = VectorXd::Zero(s + 1);
  c[0] = 1.0;
  for (Eigen::Index p = 0; p < s; ++p) {
    const double z = centers[p];
    for (Eigen::Index i = p + 1; i > 0; --i) c[i] = c[i - 1] - z * c[i];
    c[0] = -z * c[0];
  }
  return c;
}

PolynomialSpec make_spec(const VectorXd& r, double eps, double rho) {
  ClusterResult cl = cluster_centers(r, eps, rho);
  PolynomialSpec spec;
  spec.centers = cl.centers;
  spec.coeffs = poly_coeffs(cl.centers);
  spec.rho = rho;
  spec.eps = eps;
  spec.clamped = cl.clamped;
  return spec;
}

PolynomialSpec spec_from_centers(const VectorXd& centers, double eps,
                                 double rho) {
  if (centers.size() == 0)
    throw ParameterError("spec_from_centers: empty centers");
  PolynomialSpec spec;
  spec.centers = centers;
  std::sort(spec.centers.data(), spec.centers.data() + spec.centers.size());
  spec.coeffs = poly_coeffs(spec.centers);
  spec.rho = rho;
  spec.eps = eps;
  return spec;
}

PolyEval eval_f(const PolynomialSpec& spec, double x) {
  if (x < 0.0) throw ParameterError("eval_f: x must be >= 0");
  const double u = x * x;
  // g(u) = prod (u - z_p) with first and second derivatives in u.
  double g = 1.0, dg = 0.0, ddg = 0.0;
  for (Eigen::Index p = 0; p < spec.centers.size(); ++p) {
    const double t = u - spec.centers[p];
    ddg = ddg * t + 2.0 * dg;
    dg = dg * t + g;
    g *= t;
  }
  PolyEval e;
  e.f = g;
  e.df = 2.0 * x * dg;            // f'(x) = 2x g'(x^2)
  e.ddf = 2.0 * dg + 4.0 * u * ddg;  // f''(x) = 2 g' + 4 x^2 g''
  return e;
}

double eval_f_coeffs(const PolynomialSpec& spec, double x) {
  const double u = x * x;
  double acc = 0.0;
  for (Eigen::Index i = spec.coeffs.size() - 1; i >= 0; --i)
    acc = acc * u + spec.coeffs[i];
  return acc;
}

}  // namespace mlr
