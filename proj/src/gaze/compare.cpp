#include "hism/gaze/compare.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "hism/error.hpp"
#include "hism/gaze/mann_whitney.hpp"

namespace hism::gaze {

const MetricComparison& ConditionComparison::metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.metric == name) return m;
  throw Error(ErrorCode::invalid_argument, "no metric named " + name);
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::insufficient_data, "median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ConditionComparison compare_conditions(std::span<const AoiMetrics> metrics) {
  using Getter = std::function<std::optional<double>(const AoiMetrics&)>;
  const std::vector<std::pair<std::string, Getter>> getters{
      {"fixation_count", [](const AoiMetrics& m) { return std::optional<double>(m.fixation_count); }},
      {"total_dwell", [](const AoiMetrics& m) { return std::optional<double>(m.total_dwell); }},
      {"ttff", [](const AoiMetrics& m) { return m.ttff; }},
      {"revisits", [](const AoiMetrics& m) { return std::optional<double>(m.revisits); }},
  };
  ConditionComparison out;
  for (const auto& [name, get] : getters) {
    std::vector<double> hl, pl;
    MetricComparison mc;
    mc.metric = name;
    for (const auto& m : metrics) {
      const auto v = get(m);
      const bool is_hl = m.condition == Condition::highlighted;
      if (!v) {
        ++(is_hl ? mc.excluded_highlighted : mc.excluded_plain);
        continue;
      }
      (is_hl ? hl : pl).push_back(*v);
    }
    if (hl.size() < 2 || pl.size() < 2)
      throw Error(ErrorCode::insufficient_data, name + ": need >= 2 observations per condition (have " +
                                                    std::to_string(hl.size()) + " highlighted, " +
                                                    std::to_string(pl.size()) + " plain)");
    mc.n_highlighted = hl.size();
    mc.n_plain = pl.size();
    mc.median_highlighted = median(hl);
    mc.median_plain = median(pl);
    const auto mw = mann_whitney_u(hl, pl);
    mc.u = mw.u;
    mc.p_value = mw.p_value;
    mc.exact = mw.exact;
    out.metrics.push_back(mc);
  }
  return out;
}

nlohmann::ordered_json to_json(const ConditionComparison& c) {
  nlohmann::ordered_json j;
  j["test"] = "mann_whitney_u_two_sided";
  auto& arr = j["metrics"] = nlohmann::ordered_json::array();
  for (const auto& m : c.metrics)
    arr.push_back({{"metric", m.metric},
                   {"median_highlighted", m.median_highlighted},
                   {"median_plain", m.median_plain},
                   {"n_highlighted", m.n_highlighted},
                   {"n_plain", m.n_plain},
                   {"excluded_highlighted", m.excluded_highlighted},
                   {"excluded_plain", m.excluded_plain},
                   {"u", m.u},
                   {"p_value", m.p_value},
                   {"method", m.exact ? "exact" : "normal"}});
  return j;
}

}  // namespace hism::gaze
