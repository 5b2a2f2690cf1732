#pragma once

#include <vector>

#include "mlr/sampler.hpp"

namespace mlr {

struct GradConfig {
  int d = 0;
  double sigma = 1.0;
  double delta_sep = 1.0;  // weight separation bound
  double pmin = 1.0;
  double eps = 1e-3;       // target recovery error
  std::size_t m = 4096;    // batch size per step

  double zeta = 0;         // 0 -> min(delta/(2 sigma), delta pmin / 64)
  int T = 0;               // 0 -> ceil(4 (d/pmin^2) ln(zeta/eps))
  double eta0 = 0.5;       // eta_t = eta0 * zeta * pmin / d * decay^t
  double decay_const = 0.5;

  bool record_iterates = false;  // keep per-step iterates (test diagnostics)

  double resolved_zeta() const;
  int resolved_T() const;
  double eta_at(int t) const;
};

// Ascent direction of the smoothed residual objective on a batch:
//   (1/|batch|) sum sign(alpha - <v,x>) / (|alpha - <v,x>| + zeta) * x,
// with sign(0) = 0.
VectorXd stochastic_gradient(const Dataset& batch, const VectorXd& v,
                             double zeta);

// Mean of log(|alpha - <v,x>| + zeta) over the batch.
double empirical_objective(const Dataset& batch, const VectorXd& v,
                           double zeta);

struct RefineResult {
  VectorXd v;
  std::vector<double> objectives;  // batch objective before each step
  std::vector<double> etas;
  std::vector<VectorXd> iterates;  // filled when record_iterates is set
  // The contraction guarantee assumes the start is within zeta/sigma of a
  // true weight; that cannot be checked without the truth, so it is carried
  // as a declared assumption.
  bool warm_start_assumed = true;
};

// T steps of v <- v + eta_t * stochastic_gradient(batch_t, v, zeta) with the
// geometric step schedule from the config.
RefineResult refine(BatchSampler& sampler, const VectorXd& v0,
                    const GradConfig& cfg, Rng& rng);

// Monte-Carlo estimate of E[sign(<b,y>) <a,y> / (|<b,y>| + zeta)] for y
// standard normal; test oracle.
double inverse_gaussian_expectation(const VectorXd& a, const VectorXd& b,
                                    double zeta, std::size_t n, Rng& rng);

}  // namespace mlr
