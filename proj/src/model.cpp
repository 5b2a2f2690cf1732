#include "mlr/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mlr/errors.hpp"
#include "mlr/sampler.hpp"

namespace mlr {

MixtureModel::MixtureModel(VectorXd probs_in, std::vector<VectorXd> weights_in,
                           std::vector<MatrixXd> cov_sqrts_in, double sigma_in,
                           double delta_in, double pmin_in)
    : k(static_cast<int>(probs_in.size())),
      d(weights_in.empty() ? 0 : static_cast<int>(weights_in.front().size())),
      probs(std::move(probs_in)),
      weights(std::move(weights_in)),
      cov_sqrts(std::move(cov_sqrts_in)),
      sigma(sigma_in),
      delta(delta_in),
      pmin(pmin_in) {
  check_shapes();
  if (pmin <= 0.0) pmin = probs.minCoeff();
  if (delta <= 0.0 && k >= 2) delta = min_pairwise_weight_distance();
}

void MixtureModel::check_shapes() const {
  if (k < 1) throw ParameterError("model: k must be >= 1");
  if (d < 1) throw ParameterError("model: d must be >= 1");
  if (static_cast<int>(weights.size()) != k)
    throw ParameterError("model: weights count != k");
  if (static_cast<int>(cov_sqrts.size()) != k)
    throw ParameterError("model: cov_sqrts count != weights count");
  for (const auto& w : weights)
    if (w.size() != d) throw ParameterError("model: weight dimension != d");
  for (const auto& S : cov_sqrts) {
    if (S.rows() != d || S.cols() != d)
      throw ParameterError("model: cov_sqrt must be d x d");
    double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
      throw ParameterError("model: cov_sqrt must be symmetric");
  }
  if (probs.minCoeff() < 0.0)
    throw ParameterError("model: negative mixing probability");
  if (std::abs(probs.sum() - 1.0) > 1e-12)
    throw ParameterError("model: probs must sum to 1 within 1e-12");
}

double MixtureModel::min_pairwise_weight_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      best = std::min(best, (weights[i] - weights[j]).norm());
  return k >= 2 ? best : 0.0;
}

bool ValidationReport::all_pass() const {
  return a1_min_eig.pass && a1_max_eig.pass && a2_min_prob.pass &&
         a3_min_sep.pass && a3_max_norm.pass;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  auto line = [&os](const char* name, const AssumptionCheck& c) {
    os << name << ": " << (c.pass ? "pass" : "FAIL") << " (value " << c.value
       << ", bound " << c.bound << (c.enforced ? "" : ", not enforced") << ")\n";
  };
  line("A1 min eigenvalue", a1_min_eig);
  line("A1 max eigenvalue", a1_max_eig);
  line("A2 min probability", a2_min_prob);
  line("A3 min separation", a3_min_sep);
  line("A3 max weight norm", a3_max_norm);
  return os.str();
}

ValidationReport validate(const MixtureModel& model, double sigma,
                          double delta, double pmin, bool strict_a1,
                          bool strict_a3) {
  model.check_shapes();
  ValidationReport rep;

  double min_eig = std::numeric_limits<double>::infinity();
  double max_eig = -std::numeric_limits<double>::infinity();
  for (const auto& S : model.cov_sqrts) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    max_eig = std::max(max_eig, es.eigenvalues().maxCoeff());
  }
  rep.a1_min_eig = {!strict_a1 || min_eig >= 1.0 - 1e-9, strict_a1, min_eig,
                    1.0};
  rep.a1_max_eig = {!strict_a1 || max_eig <= sigma + 1e-9, strict_a1, max_eig,
                    sigma};

  double min_prob = model.probs.minCoeff();
  rep.a2_min_prob = {min_prob >= pmin, true, min_prob, pmin};

  double min_sep = model.min_pairwise_weight_distance();
  double max_norm = 0.0;
  for (const auto& w : model.weights) max_norm = std::max(max_norm, w.norm());
  bool sep_ok = model.k < 2 || min_sep >= delta;
  rep.a3_min_sep = {!strict_a3 || sep_ok, strict_a3, min_sep, delta};
  rep.a3_max_norm = {!strict_a3 || max_norm <= 1.0 + 1e-12, strict_a3,
                     max_norm, 1.0};
  return rep;
}

Dataset::Dataset(MatrixXd xs, VectorXd alphas)
    : xs_(std::move(xs)), alphas_(std::move(alphas)) {
  if (xs_.rows() != alphas_.size())
    throw ParameterError("dataset: row count mismatch");
}

Dataset::Dataset(MatrixXd xs, VectorXd alphas, std::vector<int> hidden_z)
    : Dataset(std::move(xs), std::move(alphas)) {
  hidden_z_ = std::move(hidden_z);
  if (!hidden_z_.empty() &&
      static_cast<Eigen::Index>(hidden_z_.size()) != xs_.rows())
    throw ParameterError("dataset: hidden_z length mismatch");
}

void Dataset::set_alphas(VectorXd alphas) {
  if (alphas.size() != xs_.rows())
    throw ParameterError("dataset: label length mismatch");
  alphas_ = std::move(alphas);
}

Dataset Dataset::stripped() const { return Dataset(xs_, alphas_); }

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  MatrixXd xs(rows.size(), xs_.cols());
  VectorXd alphas(rows.size());
  std::vector<int> hz;
  if (has_hidden()) hz.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= static_cast<std::size_t>(n()))
      throw ParameterError("dataset: subset index out of range");
    xs.row(i) = xs_.row(rows[i]);
    alphas[i] = alphas_[rows[i]];
    if (has_hidden()) hz.push_back(hidden_z_[rows[i]]);
  }
  return has_hidden() ? Dataset(std::move(xs), std::move(alphas), std::move(hz))
                      : Dataset(std::move(xs), std::move(alphas));
}

Dataset sample_dataset(const MixtureModel& model, std::size_t n, Rng& rng,
                       double label_noise) {
  if (n < 1) throw ParameterError("sample_dataset: n must be >= 1");
  model.check_shapes();
  const int d = model.d;
  MatrixXd xs(n, d);
  VectorXd alphas(n);
  std::vector<int> hz(n);
  VectorXd g(d);
  for (std::size_t i = 0; i < n; ++i) {
    int z = rng.discrete(model.probs);
    for (int j = 0; j < d; ++j) g[j] = rng.normal();
    VectorXd x = model.cov_sqrts[z] * g;
    double alpha = model.weights[z].dot(x);
    if (label_noise > 0.0) alpha += label_noise * rng.normal();
    xs.row(i) = x.transpose();
    alphas[i] = alpha;
    hz[i] = z;
  }
  return Dataset(std::move(xs), std::move(alphas), std::move(hz));
}

Dataset residualize(const Dataset& data, const VectorXd& a) {
  if (a.size() != data.dim())
    throw ParameterError("residualize: direction length != dataset dimension");
  VectorXd alphas = data.alphas() - data.xs() * a;
  return data.has_hidden()
             ? Dataset(data.xs(), std::move(alphas), data.hidden_z())
             : Dataset(data.xs(), std::move(alphas));
}

MixtureModel make_random_model(int k, int d, double sigma, double delta,
                               Rng& rng) {
  if (k < 1 || d < 1) throw ParameterError("make_random_model: bad k or d");
  if (sigma < 1.0) throw ParameterError("make_random_model: sigma must be >= 1");
  if (delta < 0.0 || delta >= 2.0)
    throw ParameterError("make_random_model: delta must be in [0, 2)");

  std::vector<VectorXd> weights;
  const int max_attempts = 5000;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    weights.clear();
    for (int i = 0; i < k; ++i) {
      VectorXd u = rng.normal_vector(d);
      u.normalize();
      weights.push_back(u * rng.uniform(0.6, 1.0));
    }
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      for (int j = i + 1; j < k && ok; ++j)
        if ((weights[i] - weights[j]).norm() < delta) ok = false;
    if (ok) break;
    if (attempt == max_attempts - 1)
      throw ParameterError("make_random_model: could not satisfy separation");
  }

  std::vector<MatrixXd> covs;
  for (int i = 0; i < k; ++i) {
    VectorXd diag(d);
    for (int j = 0; j < d; ++j) diag[j] = rng.uniform(1.0, sigma);
    covs.push_back(diag.asDiagonal());
  }

  VectorXd probs = VectorXd::Constant(k, 1.0 / k);
  return MixtureModel(std::move(probs), std::move(weights), std::move(covs),
                      sigma, delta, 1.0 / k);
}

DatasetSampler::DatasetSampler(const Dataset& data) : data_(&data) {
  if (data.n() == 0) throw ParameterError("sampler: empty dataset");
  scratch_.resize(data.n());
  std::iota(scratch_.begin(), scratch_.end(), std::size_t{0});
}

Dataset DatasetSampler::draw(std::size_t m, Rng& rng) {
  const std::size_t n = scratch_.size();
  if (m > n)
    throw ResourceError("sampler: batch size exceeds available rows (" +
                        std::to_string(m) + " > " + std::to_string(n) + ")");
  // Partial Fisher-Yates: the first m entries become the batch.
  std::vector<std::size_t> rows(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + rng.index(n - i);
    std::swap(scratch_[i], scratch_[j]);
    rows[i] = scratch_[i];
  }
  drawn_ += m;
  return data_->subset(rows).stripped();
}

}  // namespace mlr
