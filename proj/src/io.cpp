#include "mlr/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "mlr/errors.hpp"
#include "mlr/version.hpp"

namespace mlr {

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view sv, const std::string& context) {
  double value = 0.0;
  const char* begin = sv.data();
  const char* end = sv.data() + sv.size();
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw DataError("could not parse number '" + std::string(sv) + "' in " +
                    context);
  return value;
}

VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw DataError("model file: expected an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw DataError("model file: expected a nonempty 2d array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw DataError("model file: ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

MixtureModel model_from_json(const json& j) {
  try {
    const int k = j.at("k").get<int>();
    const int d = j.at("d").get<int>();
    VectorXd probs = vector_from_json(j.at("probs"));

    std::vector<VectorXd> weights;
    for (const auto& w : j.at("weights")) weights.push_back(vector_from_json(w));

    std::vector<MatrixXd> covs;
    if (!j.contains("cov_sqrts") ||
        (j["cov_sqrts"].is_string() && j["cov_sqrts"] == "identity")) {
      for (int i = 0; i < k; ++i)
        covs.push_back(MatrixXd::Identity(d, d));
    } else if (j["cov_sqrts"].is_object() && j["cov_sqrts"].contains("diag")) {
      for (const auto& row : j["cov_sqrts"]["diag"]) {
        VectorXd diag = vector_from_json(row);
        covs.push_back(MatrixXd(diag.asDiagonal()));
      }
    } else {
      for (const auto& m : j["cov_sqrts"]) covs.push_back(matrix_from_json(m));
    }

    MixtureModel model(std::move(probs), std::move(weights), std::move(covs),
                       j.value("sigma", 1.0), j.value("delta", 0.0),
                       j.value("pmin", 0.0));
    if (model.k != k || model.d != d)
      throw DataError("model file: k/d fields disagree with the arrays");
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

json model_to_json(const MixtureModel& model) {
  json j;
  j["k"] = model.k;
  j["d"] = model.d;
  j["sigma"] = model.sigma;
  j["delta"] = model.delta;
  j["pmin"] = model.pmin;
  j["probs"] = json::array();
  for (Eigen::Index i = 0; i < model.probs.size(); ++i)
    j["probs"].push_back(model.probs[i]);
  j["weights"] = json::array();
  for (const auto& w : model.weights) {
    json row = json::array();
    for (Eigen::Index i = 0; i < w.size(); ++i) row.push_back(w[i]);
    j["weights"].push_back(std::move(row));
  }
  j["cov_sqrts"] = json::array();
  for (const auto& S : model.cov_sqrts) j["cov_sqrts"].push_back(matrix_to_json(S));
  return j;
}

MixtureModel read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

void write_model(const MixtureModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << model_to_json(model).dump(2) << "\n";
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);

  std::string header;
  if (!std::getline(in, header))
    throw DataError("dataset file " + path + ": empty file");

  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  int d = 0;
  while (d < static_cast<int>(cols.size()) &&
         cols[d] == "x" + std::to_string(d + 1))
    ++d;
  if (d == 0 || d >= static_cast<int>(cols.size()) || cols[d] != "alpha")
    throw DataError("dataset file " + path +
                    ": header must be x1,...,xd,alpha[,z]");
  bool has_z = false;
  if (static_cast<int>(cols.size()) == d + 2 && cols[d + 1] == "z")
    has_z = true;
  else if (static_cast<int>(cols.size()) != d + 1)
    throw DataError("dataset file " + path + ": unexpected trailing columns");

  std::vector<double> values;
  std::vector<int> zs;
  std::string line;
  std::size_t nrows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    int col = 0;
    while (std::getline(ss, tok, ',')) {
      if (col < d + 1)
        values.push_back(parse_double(tok, path));
      else if (has_z && col == d + 1)
        zs.push_back(static_cast<int>(parse_double(tok, path)));
      ++col;
    }
    if (col != d + 1 + (has_z ? 1 : 0))
      throw DataError("dataset file " + path + ": row " +
                      std::to_string(nrows + 2) + " has " +
                      std::to_string(col) + " fields");
    ++nrows;
  }
  if (nrows == 0) throw DataError("dataset file " + path + ": no rows");

  MatrixXd xs(nrows, d);
  VectorXd alphas(nrows);
  for (std::size_t r = 0; r < nrows; ++r) {
    for (int c = 0; c < d; ++c) xs(r, c) = values[r * (d + 1) + c];
    alphas[r] = values[r * (d + 1) + d];
  }
  if (!xs.allFinite() || !alphas.allFinite())
    throw DataError("dataset file " + path + ": non-finite values");
  return has_z ? Dataset(std::move(xs), std::move(alphas), std::move(zs))
               : Dataset(std::move(xs), std::move(alphas));
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file: " + path);
  for (Eigen::Index c = 0; c < data.dim(); ++c) out << "x" << (c + 1) << ",";
  out << "alpha";
  if (data.has_hidden()) out << ",z";
  out << "\n";
  for (Eigen::Index r = 0; r < data.n(); ++r) {
    for (Eigen::Index c = 0; c < data.dim(); ++c)
      out << format_double(data.xs()(r, c)) << ",";
    out << format_double(data.alphas()[r]);
    if (data.has_hidden()) out << "," << data.hidden_z()[r];
    out << "\n";
  }
}

namespace {

json descent_state_json(const DescentState& st, bool verbose) {
  json j;
  j["iterations"] = st.iter + 1;
  j["sigma_t"] = st.sigma_t;
  j["reached_target"] = st.reached_target;
  j["stalls"] = st.stalls_total;
  j["accept_factor"] = st.accept_factor;
  int accepted = 0;
  for (const auto& rec : st.trace) accepted += rec.accepted ? 1 : 0;
  j["accepted_steps"] = accepted;
  if (verbose) {
    json t = json::array();
    for (const auto& rec : st.trace) {
      t.push_back({{"iter", rec.iter},
                   {"sigma_sq", rec.sigma_sq},
                   {"eta", rec.eta},
                   {"trials", rec.trials},
                   {"accepted", rec.accepted},
                   {"sigma_prime_sq", rec.sigma_prime_sq},
                   {"stalled", rec.stalled}});
    }
    j["trace"] = std::move(t);
  }
  return j;
}

json refine_json(const RefineResult& rr, bool verbose) {
  json j;
  j["steps"] = rr.objectives.size();
  j["final_objective"] =
      rr.objectives.empty() ? 0.0 : rr.objectives.back();
  j["warm_start_assumed"] = rr.warm_start_assumed;
  if (verbose) {
    j["objectives"] = rr.objectives;
    j["etas"] = rr.etas;
  }
  return j;
}

}  // namespace

json fit_report_to_json(const FitReport& report, bool verbose_trace) {
  json j;
  j["version"] = kVersion;
  j["seed"] = report.seed;
  j["status"] = report.status;
  j["k"] = report.k;
  j["d"] = report.d;
  j["samples_consumed"] = report.samples_consumed;
  j["total_seconds"] = report.total_seconds;
  j["recovered"] = json::array();
  for (const auto& v : report.recovered) {
    json row = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
    j["recovered"].push_back(std::move(row));
  }
  j["rounds"] = json::array();
  for (const auto& rr : report.rounds) {
    json r;
    r["momentdescent"] = descent_state_json(rr.descent, verbose_trace);
    r["refine"] = refine_json(rr.refinement, verbose_trace);
    r["threshold"] = rr.threshold;
    r["removed_count"] = rr.removed_count;
    r["seconds_descent"] = rr.seconds_descent;
    r["seconds_refine"] = rr.seconds_refine;
    j["rounds"].push_back(std::move(r));
  }
  if (report.evaluated) {
    json e;
    e["permutation"] = report.permutation;
    e["per_component_errors"] = report.matched_errors;
    e["max_error"] = report.max_error;
    j["evaluation"] = std::move(e);
  }
  return j;
}

std::string config_hash(const json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace mlr
