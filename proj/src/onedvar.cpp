#include "mlr/onedvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mlr/errors.hpp"

namespace mlr {

namespace {

using Eigen::ArrayXd;
using Eigen::ArrayXXd;

constexpr double kLog2Pi = 1.8378770664093453;

double quantile_sorted(const std::vector<double>& sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

struct EmState {
  VectorXd vars;
  VectorXd weights;
  double loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  bool converged = false;
};

// Runs up to max_iters EM steps in place; stops early on relative
// log-likelihood stagnation.
void em_iterate(const ArrayXd& sq, EmState& st, double floor, int max_iters,
                double tol) {
  const Eigen::Index m = sq.size();
  const int k = static_cast<int>(st.vars.size());
  ArrayXXd logp(m, k);
  ArrayXd rowmax(m), rowsum(m);

  for (int iter = 0; iter < max_iters; ++iter) {
    for (int j = 0; j < k; ++j) {
      double v = st.vars[j];
      double c = std::log(std::max(st.weights[j], 1e-300)) -
                 0.5 * (kLog2Pi + std::log(v));
      logp.col(j) = c - sq * (0.5 / v);
    }
    rowmax = logp.rowwise().maxCoeff();
    for (int j = 0; j < k; ++j) logp.col(j) = (logp.col(j) - rowmax).exp();
    rowsum = logp.rowwise().sum();
    double ll = (rowmax + rowsum.log()).sum();
    st.trace.push_back(ll);
    if (st.trace.size() > 1) {
      double prev = st.trace[st.trace.size() - 2];
      // Per-sample improvement threshold; log-likelihood differences are
      // invariant under rescaling the data, so the stopping point is too.
      if (ll - prev <= tol * static_cast<double>(m)) {
        st.loglik = ll;
        st.converged = true;
        return;
      }
    }
    st.loglik = ll;
    // M step: logp now holds unnormalized responsibilities.
    for (int j = 0; j < k; ++j) {
      ArrayXd gamma = logp.col(j) / rowsum;
      double nj = gamma.sum();
      st.weights[j] = std::max(nj / static_cast<double>(m), 1e-12);
      st.vars[j] =
          nj > 0 ? std::max((gamma * sq).sum() / nj, floor) : floor;
    }
    st.weights /= st.weights.sum();
  }
}

void sort_by_variance(EmState& st) {
  const int k = static_cast<int>(st.vars.size());
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return st.vars[a] < st.vars[b]; });
  VectorXd v(k), w(k);
  for (int i = 0; i < k; ++i) {
    v[i] = st.vars[idx[i]];
    w[i] = st.weights[idx[i]];
  }
  st.vars = v;
  st.weights = w;
}

}  // namespace

OneDEstimate estimate_variances(const VectorXd& values, int k,
                                const OneDConfig& cfg, Rng& rng) {
  if (values.size() == 0) throw DataError("estimate_variances: empty input");
  if (!values.allFinite())
    throw DataError("estimate_variances: non-finite input");
  if (k < 1) throw ParameterError("estimate_variances: k must be >= 1");
  if (k > values.size())
    throw ParameterError("estimate_variances: k exceeds the number of values");
  if (cfg.variance_floor <= 0.0)
    throw ParameterError("estimate_variances: variance_floor must be > 0");

  const double floor = cfg.variance_floor;
  ArrayXd sq = values.array().square();

  if (k == 1) {
    OneDEstimate out;
    double v = std::max(sq.mean(), floor);
    out.variances = VectorXd::Constant(1, v);
    out.mix_weights = VectorXd::Constant(1, 1.0);
    out.loglik = (-0.5 * (kLog2Pi + std::log(v)) - sq * (0.5 / v)).sum();
    out.restarts_used = 1;
    out.loglik_trace = {out.loglik};
    return out;
  }

  std::vector<double> sorted(sq.data(), sq.data() + sq.size());
  std::sort(sorted.begin(), sorted.end());
  double lo = std::max(quantile_sorted(sorted, 0.05), floor);
  double hi = std::max(quantile_sorted(sorted, 0.95), lo * (1.0 + 1e-9));

  const int restarts = std::max(cfg.restarts, 1);
  std::vector<EmState> states(restarts);
  double log_lo = std::log(lo), log_hi = std::log(hi);
  for (int r = 0; r < restarts; ++r) {
    VectorXd init(k);
    if (r == 0) {
      for (int j = 0; j < k; ++j)
        init[j] = std::exp(log_lo + (log_hi - log_lo) * j /
                                        std::max(k - 1, 1));
    } else {
      for (int j = 0; j < k; ++j)
        init[j] = std::exp(rng.uniform(log_lo, log_hi));
      std::sort(init.data(), init.data() + k);
    }
    states[r].vars = init.cwiseMax(floor);
    states[r].weights = VectorXd::Constant(k, 1.0 / k);
  }

  // Short warmup for every restart, then only the most promising ones run
  // to convergence.
  const int warmup = std::min(8, cfg.max_iters);
  for (auto& st : states) em_iterate(sq, st, floor, warmup, cfg.tol);

  std::vector<int> order(restarts);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return states[a].loglik > states[b].loglik;
  });
  const int keep = std::min(restarts, std::max(2, (restarts + 3) / 4));
  for (int i = 0; i < keep; ++i) {
    EmState& st = states[order[i]];
    if (!st.converged)
      em_iterate(sq, st, floor, cfg.max_iters - warmup, cfg.tol);
  }

  int best = order[0];
  for (int i = 0; i < keep; ++i) {
    int r = order[i];
    if (states[r].loglik > states[best].loglik ||
        (states[r].loglik == states[best].loglik && r < best))
      best = r;
  }

  EmState winner = states[best];
  sort_by_variance(winner);
  OneDEstimate out;
  out.variances = winner.vars;
  out.mix_weights = winner.weights;
  out.loglik = winner.loglik;
  out.restarts_used = restarts;
  out.loglik_trace = winner.trace;
  return out;
}

double min_variance(const OneDEstimate& est, double weight_cutoff) {
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (Eigen::Index i = 0; i < est.variances.size(); ++i) {
    if (est.mix_weights[i] >= weight_cutoff) {
      best = std::min(best, est.variances[i]);
      found = true;
    }
  }
  if (!found) best = est.variances.minCoeff();
  return best;
}

}  // namespace mlr
