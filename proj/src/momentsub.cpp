#include "mlr/momentsub.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlr/errors.hpp"

namespace mlr {

double double_factorial(int p) {
  if (p < 0) throw ParameterError("double_factorial: p must be >= 0");
  if (p > 15) throw ParameterError("double_factorial: p > 15 overflows");
  double acc = 1.0;
  for (int i = 3; i <= 2 * p - 1; i += 2) acc *= i;
  return acc;
}

MomentMatrix moment_matrix(const Dataset& data, const PolynomialSpec& spec) {
  if (data.n() == 0) throw DataError("moment_matrix: empty dataset");
  const Eigen::Index m = data.n();
  const Eigen::Index s = spec.centers.size();
  if (spec.coeffs.size() != s + 1)
    throw ParameterError("moment_matrix: malformed polynomial spec");

  VectorXd scaled(s + 1);
  for (Eigen::Index p = 0; p <= s; ++p)
    scaled[p] = spec.coeffs[p] / double_factorial(static_cast<int>(p));

  // Horner in alpha^2; rows whose alpha^(2s) would exceed 1e300 are clipped.
  const double a2_cap = std::pow(1e300, 1.0 / static_cast<double>(s));
  MomentMatrix out;
  out.spec = spec;
  out.sample_count = static_cast<std::size_t>(m);

  VectorXd w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double a2 = data.alphas()[i] * data.alphas()[i];
    if (a2 > a2_cap) {
      a2 = a2_cap;
      ++out.clipped_rows;
    }
    double acc = scaled[s];
    for (Eigen::Index p = s - 1; p >= 0; --p) acc = acc * a2 + scaled[p];
    w[i] = acc;
  }

  MatrixXd M =
      data.xs().transpose() * w.asDiagonal() * data.xs() / static_cast<double>(m);
  out.mat = 0.5 * (M + M.transpose());
  if (!out.mat.allFinite())
    throw DataError("moment_matrix: non-finite accumulation");
  return out;
}

MatrixXd population_moment(const MatrixXd& cov_sqrt, const VectorXd& v,
                           int p) {
  if (cov_sqrt.rows() != cov_sqrt.cols() || cov_sqrt.rows() != v.size())
    throw ParameterError("population_moment: shape mismatch");
  if (p < 0) throw ParameterError("population_moment: p must be >= 0");
  const MatrixXd S2 = cov_sqrt * cov_sqrt;
  if (p == 0) return S2;
  const double nrm = (cov_sqrt * v).norm();
  if (nrm == 0.0) return MatrixXd::Zero(v.size(), v.size());
  const VectorXd s2v = S2 * v;
  const double scale = double_factorial(p) * std::pow(nrm, 2 * p);
  return scale * ((2.0 * p / (nrm * nrm)) * (s2v * s2v.transpose()) + S2);
}

MatrixXd population_moment_mix(const MixtureModel& model, const VectorXd& a,
                               const PolynomialSpec& spec) {
  if (a.size() != model.d)
    throw ParameterError("population_moment_mix: shape mismatch");
  MatrixXd M = MatrixXd::Zero(model.d, model.d);
  for (int i = 0; i < model.k; ++i) {
    const VectorXd v = model.weights[i] - a;
    const MatrixXd& S = model.cov_sqrts[i];
    const MatrixXd S2 = S * S;
    const double nrm = (S * v).norm();
    const PolyEval pe = eval_f(spec, nrm);
    MatrixXd term = S2 * pe.f;  // noise part Y_i
    if (nrm > 0.0) {
      const VectorXd s2v = S2 * v;
      term += (pe.df * nrm / (nrm * nrm)) * (s2v * s2v.transpose());
    }
    M += model.probs[i] * term;
  }
  return M;
}

SubspaceEstimate top_k_subspace(const MatrixXd& sym, int k) {
  const Eigen::Index d = sym.rows();
  if (sym.cols() != d) throw ParameterError("top_k_subspace: not square");
  if (k < 1) throw ParameterError("top_k_subspace: k must be >= 1");
  if (k > d) throw ParameterError("top_k_subspace: k exceeds dimension");

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (sym + sym.transpose()));
  if (es.info() != Eigen::Success)
    throw InternalError("top_k_subspace: eigendecomposition failed");

  std::vector<Eigen::Index> idx(d);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const VectorXd& ev = es.eigenvalues();
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(ev[a]) > std::abs(ev[b]);
  });

  SubspaceEstimate out;
  out.basis.resize(d, k);
  out.abs_eigenvalues.resize(k);
  for (int j = 0; j < k; ++j) {
    VectorXd col = es.eigenvectors().col(idx[j]);
    // Deterministic sign: largest-magnitude entry positive.
    Eigen::Index imax = 0;
    col.cwiseAbs().maxCoeff(&imax);
    if (col[imax] < 0.0) col = -col;
    out.basis.col(j) = col;
    out.abs_eigenvalues[j] = std::abs(ev[idx[j]]);
  }
  return out;
}

SubspaceEstimate top_k_subspace(const MomentMatrix& M, int k) {
  return top_k_subspace(M.mat, k);
}

PowerwTolerances PowerwTolerances::theoretical(double eps, double sigma,
                                               int k) {
  PowerwTolerances t;
  t.cluster_eps = eps;
  t.onedvar.tol = std::max(std::pow(eps / sigma, 4.0 * k), 1e-300);
  return t;
}

SubspaceEstimate powerw(const Dataset& data, int k,
                        const PowerwTolerances& tol, Rng& rng) {
  OneDEstimate est = estimate_variances(data.alphas(), k, tol.onedvar, rng);
  return powerw(data, k, est, tol);
}

SubspaceEstimate powerw(const Dataset& data, int k, const OneDEstimate& est,
                        const PowerwTolerances& tol) {
  const VectorXd& r = est.variances;
  double rho = tol.rho_margin *
               std::max({r.maxCoeff(), 1.0 / r.minCoeff(), 1.0});
  PolynomialSpec spec = make_spec(r, tol.cluster_eps, rho);
  MomentMatrix M = moment_matrix(data, spec);
  return top_k_subspace(M, k);
}

}  // namespace mlr
