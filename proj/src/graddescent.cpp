#include "mlr/graddescent.hpp"

#include <cmath>

#include "mlr/errors.hpp"

namespace mlr {

double GradConfig::resolved_zeta() const {
  if (zeta > 0) return zeta;
  return std::min(delta_sep / (2.0 * sigma), delta_sep * pmin / 64.0);
}

int GradConfig::resolved_T() const {
  if (T > 0) return T;
  double z = resolved_zeta();
  double steps = 4.0 * (d / (pmin * pmin)) * std::log(std::max(z / eps, 2.0));
  return static_cast<int>(std::ceil(steps));
}

double GradConfig::eta_at(int t) const {
  const double z = resolved_zeta();
  const double base = eta0 * z * pmin / d;
  return base * std::pow(1.0 - decay_const * pmin * pmin / d, t);
}

VectorXd stochastic_gradient(const Dataset& batch, const VectorXd& v,
                             double zeta) {
  if (zeta <= 0.0) throw ParameterError("stochastic_gradient: zeta must be > 0");
  if (batch.n() == 0) throw DataError("stochastic_gradient: empty batch");
  if (v.size() != batch.dim())
    throw ParameterError("stochastic_gradient: dimension mismatch");

  VectorXd r = batch.alphas() - batch.xs() * v;
  VectorXd coef(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    double s = r[i] > 0 ? 1.0 : (r[i] < 0 ? -1.0 : 0.0);
    coef[i] = s / (std::abs(r[i]) + zeta);
  }
  return batch.xs().transpose() * coef / static_cast<double>(batch.n());
}

double empirical_objective(const Dataset& batch, const VectorXd& v,
                           double zeta) {
  if (zeta <= 0.0)
    throw ParameterError("empirical_objective: zeta must be > 0");
  if (batch.n() == 0) throw DataError("empirical_objective: empty batch");
  VectorXd r = batch.alphas() - batch.xs() * v;
  return (r.array().abs() + zeta).log().mean();
}

RefineResult refine(BatchSampler& sampler, const VectorXd& v0,
                    const GradConfig& cfg, Rng& rng) {
  if (v0.size() != sampler.dim())
    throw ParameterError("refine: warm start dimension mismatch");
  const double zeta = cfg.resolved_zeta();
  if (zeta <= 0.0) throw ParameterError("refine: resolved zeta must be > 0");
  const int T = cfg.resolved_T();

  RefineResult out;
  out.v = v0;
  out.objectives.reserve(T);
  out.etas.reserve(T);
  for (int t = 0; t < T; ++t) {
    Dataset batch = sampler.draw(cfg.m, rng);
    out.objectives.push_back(empirical_objective(batch, out.v, zeta));
    const double eta = cfg.eta_at(t);
    out.etas.push_back(eta);
    out.v += eta * stochastic_gradient(batch, out.v, zeta);
    if (cfg.record_iterates) out.iterates.push_back(out.v);
  }
  return out;
}

double inverse_gaussian_expectation(const VectorXd& a, const VectorXd& b,
                                    double zeta, std::size_t n, Rng& rng) {
  if (b.norm() == 0.0)
    throw ParameterError("inverse_gaussian_expectation: b must be nonzero");
  if (a.size() != b.size())
    throw ParameterError("inverse_gaussian_expectation: dimension mismatch");
  if (n < 1) throw ParameterError("inverse_gaussian_expectation: n must be >= 1");

  const Eigen::Index d = a.size();
  double acc = 0.0;
  VectorXd y(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) y[j] = rng.normal();
    const double sb = b.dot(y);
    const double s = sb > 0 ? 1.0 : (sb < 0 ? -1.0 : 0.0);
    const double denom = std::abs(sb) + zeta;
    if (denom > 0.0) acc += s * a.dot(y) / denom;
  }
  return acc / static_cast<double>(n);
}

}  // namespace mlr
