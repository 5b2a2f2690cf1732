#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "mlr/learner.hpp"
#include "mlr/model.hpp"

namespace mlr {

using json = nlohmann::json;

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double x);

// Model file schema:
//   {k, d, sigma, delta, pmin, probs: [...], weights: [[...]],
//    cov_sqrts: [[[...]]] | {"diag": [[...]]} | "identity"}
MixtureModel model_from_json(const json& j);
json model_to_json(const MixtureModel& model);
MixtureModel read_model(const std::string& path);
void write_model(const MixtureModel& model, const std::string& path);

// Dataset files are CSV with header x1,...,xd,alpha[,z].
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const Dataset& data, const std::string& path);

json fit_report_to_json(const FitReport& report, bool verbose_trace = false);

// FNV-1a over the canonical dump; reports embed it so runs can be matched to
// their configuration.
std::string config_hash(const json& j);

}  // namespace mlr
