#pragma once

#include "mlr/model.hpp"

namespace mlr {

// Even polynomial f(x) = prod_p (x^2 - z_p) described both by its roots in
// x^2 (centers) and by the coefficients of x^(2i). Evaluation always goes
// through the product form; the coefficients exist for assembling the
// mixed-moment matrix.
struct PolynomialSpec {
  VectorXd centers;  // nondecreasing, inside [1/rho, rho]
  VectorXd coeffs;   // length s+1, monic: coeffs[s] == 1
  double rho = 0.0;
  double eps = 0.0;
  bool clamped = false;  // some input r_i had to be clamped into range
};

struct ClusterResult {
  VectorXd centers;
  bool clamped = false;
};

// Sorts r ascending, keeps z_1 = min r, drops every r_i below z_1 + eps/rho,
// and keeps the rest as centers. Inputs outside [1/rho, rho] are clamped
// into range and flagged.
ClusterResult cluster_centers(const VectorXd& r, double eps, double rho);

// Expands prod_p (u - z_p) into coefficients of u^i (u = x^2).
VectorXd poly_coeffs(const VectorXd& centers);

PolynomialSpec make_spec(const VectorXd& r, double eps, double rho);

// Builds a spec directly from given centers, bypassing clustering.
PolynomialSpec spec_from_centers(const VectorXd& centers, double eps,
                                 double rho);

struct PolyEval {
  double f = 0.0;
  double df = 0.0;
  double ddf = 0.0;
};

// f, f', f'' at x >= 0, computed from the product form.
PolyEval eval_f(const PolynomialSpec& spec, double x);

// Evaluates f via the stored coefficients (used to cross-check the two
// representations).
double eval_f_coeffs(const PolynomialSpec& spec, double x);

}  // namespace mlr
