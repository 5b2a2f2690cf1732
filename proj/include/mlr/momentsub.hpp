#pragma once

#include "mlr/onedvar.hpp"
#include "mlr/polycoeff.hpp"

namespace mlr {

// (2p-1)!! with the empty product (p = 0) equal to 1. Guarded at p <= 15.
double double_factorial(int p);

// Mixed-moment matrix M = (1/m) sum_l omega_l x_l x_l^T with per-row weight
// omega_l = sum_p (c_p / (2p-1)!!) alpha_l^(2p).
struct MomentMatrix {
  MatrixXd mat;
  std::size_t sample_count = 0;
  PolynomialSpec spec;
  std::size_t clipped_rows = 0;  // rows whose alpha^(2s) exceeded 1e300
};

MomentMatrix moment_matrix(const Dataset& data, const PolynomialSpec& spec);

// Closed form of E[<z,v>^(2p) z z^T] for z = Sigma g, g standard normal:
//   (2p-1)!! * |Sigma v|^(2p) * (2p * S2 v v^T S2 / |Sigma v|^2 + S2),
// with S2 = Sigma^2.
MatrixXd population_moment(const MatrixXd& cov_sqrt, const VectorXd& v, int p);

// Expectation of moment_matrix for data drawn from the model and labels
// residualized by a: sum_i p_i (X_i + Y_i) with v_i = w_i - a,
//   X_i = (S2 v v^T S2 / |Sigma v|^2) * f'(|Sigma v|) * |Sigma v|,
//   Y_i = S2 * f(|Sigma v|).
MatrixXd population_moment_mix(const MixtureModel& model, const VectorXd& a,
                               const PolynomialSpec& spec);

// Column-orthonormal basis of the dominant eigenspace, ordered by
// |eigenvalue| descending.
struct SubspaceEstimate {
  MatrixXd basis;             // d x k
  VectorXd abs_eigenvalues;   // k largest |eigenvalues|, descending
};

SubspaceEstimate top_k_subspace(const MatrixXd& sym, int k);
SubspaceEstimate top_k_subspace(const MomentMatrix& M, int k);

struct PowerwTolerances {
  OneDConfig onedvar;
  double cluster_eps = 0.05;   // clustering separation for the centers
  double rho_margin = 2.0;     // rho = margin * max(max r, 1/min r)
  double weight_cutoff = 0.0;  // min_variance filter, typically pmin/2

  // The conditioning-faithful choices: EM tolerance (eps/sigma)^(4k) and
  // clustering separation eps. Underflows for modest k; kept behind this
  // switch for study.
  static PowerwTolerances theoretical(double eps, double sigma, int k);
};

// Variance estimation -> coefficient construction -> mixed-moment matrix ->
// dominant subspace. Labels must already be residualized by the caller.
SubspaceEstimate powerw(const Dataset& data, int k,
                        const PowerwTolerances& tol, Rng& rng);

// Same pipeline with the variance estimation step supplied by the caller.
SubspaceEstimate powerw(const Dataset& data, int k, const OneDEstimate& est,
                        const PowerwTolerances& tol);

}  // namespace mlr
