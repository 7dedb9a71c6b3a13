#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hism::eval {

/// Mean of (pred - gt)^2 over windows whose ground truth is not masked.
/// Throws GridMismatch when lengths differ; returns 0 with *count = 0 when
/// every window is masked.
double masked_mse(std::span<const double> pred, std::span<const double> gt, std::span<const std::uint8_t> masked,
                  std::size_t* count = nullptr);

/// One critical situation's event-aligned AOI values.
struct CsTrace {
  std::string session_id;
  int cs_id = 0;
  bool highlighted = false;
  std::vector<double> ground_truth;
  std::vector<std::uint8_t> masked;
  std::map<std::string, std::vector<double>> predictions;  // by model
};

struct ModelScore {
  std::string model;
  double mse = 0.0;
};

struct ConditionCurves {
  std::size_t events = 0;
  std::map<std::string, std::vector<double>> curves;  // by model, incl. ground_truth
};

struct EvaluationReport {
  std::vector<std::string> models;
  std::vector<std::string> test_sessions;
  double pre = 5.0;
  double window_width = 0.5;
  std::vector<double> rel_time;
  std::size_t window_count = 0;
  std::vector<ModelScore> scores;
  ConditionCurves highlighted;
  ConditionCurves plain;

  double mse(const std::string& model) const;
};

/// Pools traces into per-model MSE over all non-masked windows and
/// per-condition mean curves (ground truth averages non-masked entries only).
EvaluationReport evaluate(const std::vector<CsTrace>& traces, const std::vector<std::string>& models,
                          double pre, double window_width);

nlohmann::ordered_json to_json(const EvaluationReport& r);
/// `rel_time_s,model,mean_saliency` for highlighted critical situations.
std::string format_curves_csv(const EvaluationReport& r);
std::string format_predictions_csv(const std::vector<CsTrace>& traces, const std::vector<std::string>& models,
                                   double pre, double window_width);

/// Writes report.json and curves.csv (and predictions.csv when traces are given).
void export_report(const EvaluationReport& r, const std::filesystem::path& dir,
                   const std::vector<CsTrace>* traces = nullptr);

}  // namespace hism::eval
