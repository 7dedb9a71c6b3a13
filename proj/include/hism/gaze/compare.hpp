#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hism/gaze/aoi_metrics.hpp"

namespace hism::gaze {

struct MetricComparison {
  std::string metric;
  double median_highlighted = 0.0;
  double median_plain = 0.0;
  std::size_t n_highlighted = 0;
  std::size_t n_plain = 0;
  std::size_t excluded_highlighted = 0;  // censored (never fixated) observations
  std::size_t excluded_plain = 0;
  double u = 0.0;  // U of the highlighted group
  double p_value = 1.0;
  bool exact = false;
};

struct ConditionComparison {
  std::vector<MetricComparison> metrics;  // fixation_count, total_dwell, ttff, revisits
  const MetricComparison& metric(const std::string& name) const;
};

double median(std::vector<double> values);

/// Per-metric medians and Mann-Whitney tests between highlight conditions.
/// Throws InsufficientData unless each condition has >= 2 usable observations
/// for every metric.
ConditionComparison compare_conditions(std::span<const AoiMetrics> metrics);

nlohmann::ordered_json to_json(const ConditionComparison& c);

}  // namespace hism::gaze
