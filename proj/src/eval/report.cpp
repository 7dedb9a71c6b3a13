#include "hism/eval/report.hpp"

#include <cmath>
#include <cstdio>

#include "hism/error.hpp"
#include "hism/io.hpp"

namespace hism::eval {

double masked_mse(std::span<const double> pred, std::span<const double> gt, std::span<const std::uint8_t> masked,
                  std::size_t* count) {
  if (pred.size() != gt.size() || masked.size() != gt.size())
    throw Error(ErrorCode::grid_mismatch, "prediction has " + std::to_string(pred.size()) +
                                              " windows, ground truth " + std::to_string(gt.size()));
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (masked[i]) continue;
    const double d = pred[i] - gt[i];
    sum += d * d;
    ++n;
  }
  if (count) *count = n;
  return n ? sum / static_cast<double>(n) : 0.0;
}

double EvaluationReport::mse(const std::string& model) const {
  for (const auto& s : scores)
    if (s.model == model) return s.mse;
  throw Error(ErrorCode::invalid_argument, "no score for model " + model);
}

EvaluationReport evaluate(const std::vector<CsTrace>& traces, const std::vector<std::string>& models,
                          double pre, double window_width) {
  EvaluationReport r;
  r.models = models;
  r.pre = pre;
  r.window_width = window_width;
  const std::size_t n = traces.empty() ? 0 : traces.front().ground_truth.size();
  for (std::size_t k = 0; k < n; ++k) r.rel_time.push_back(-pre + static_cast<double>(k) * window_width);

  std::map<std::string, double> sq;
  for (const auto& t : traces) {
    if (t.ground_truth.size() != n) throw Error(ErrorCode::grid_mismatch, "traces differ in length");
    if (r.test_sessions.empty() || r.test_sessions.back() != t.session_id) r.test_sessions.push_back(t.session_id);
    for (const auto& m : models) {
      const auto it = t.predictions.find(m);
      if (it == t.predictions.end()) throw Error(ErrorCode::invalid_argument, "trace lacks model " + m);
      std::size_t count = 0;
      const double mse = masked_mse(it->second, t.ground_truth, t.masked, &count);
      sq[m] += mse * static_cast<double>(count);
      if (&m == &models.front()) r.window_count += count;
    }
  }
  for (const auto& m : models)
    r.scores.push_back({m, r.window_count ? sq[m] / static_cast<double>(r.window_count) : 0.0});

  for (const bool hl : {true, false}) {
    ConditionCurves& cc = hl ? r.highlighted : r.plain;
    std::vector<double> gt_sum(n, 0.0), gt_cnt(n, 0.0);
    std::map<std::string, std::vector<double>> sums;
    for (const auto& m : models) sums[m].assign(n, 0.0);
    for (const auto& t : traces) {
      if (t.highlighted != hl) continue;
      ++cc.events;
      for (std::size_t k = 0; k < n; ++k) {
        if (!t.masked[k]) {
          gt_sum[k] += t.ground_truth[k];
          gt_cnt[k] += 1;
        }
        for (const auto& m : models) sums[m][k] += t.predictions.at(m)[k];
      }
    }
    std::vector<double> gt(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) gt[k] = gt_cnt[k] > 0 ? gt_sum[k] / gt_cnt[k] : 0.0;
    cc.curves["ground_truth"] = gt;
    for (const auto& m : models) {
      auto& v = sums[m];
      if (cc.events)
        for (double& x : v) x /= static_cast<double>(cc.events);
      cc.curves[m] = v;
    }
  }
  return r;
}

namespace {

nlohmann::ordered_json curves_json(const ConditionCurves& cc, const std::vector<std::string>& models) {
  nlohmann::ordered_json j;
  j["events"] = cc.events;
  nlohmann::ordered_json curves;
  curves["ground_truth"] = cc.curves.at("ground_truth");
  for (const auto& m : models) curves[m] = cc.curves.at(m);
  j["curves"] = curves;
  return j;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

nlohmann::ordered_json to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "hism.report/1";
  j["models"] = r.models;
  j["test_sessions"] = r.test_sessions;
  j["window_count"] = r.window_count;
  j["window_width_s"] = r.window_width;
  nlohmann::ordered_json mse;
  for (const auto& s : r.scores) mse[s.model] = s.mse;
  j["mse"] = mse;
  j["rel_time_s"] = r.rel_time;
  j["highlighted"] = curves_json(r.highlighted, r.models);
  j["plain"] = curves_json(r.plain, r.models);
  return j;
}

std::string format_curves_csv(const EvaluationReport& r) {
  std::string out = "rel_time_s,model,mean_saliency\n";
  std::vector<std::string> order{"ground_truth"};
  order.insert(order.end(), r.models.begin(), r.models.end());
  for (const auto& m : order) {
    const auto& v = r.highlighted.curves.at(m);
    for (std::size_t k = 0; k < v.size(); ++k)
      out += fmt("%.2f", r.rel_time[k]) + "," + m + "," + fmt("%.9f", v[k]) + "\n";
  }
  return out;
}

std::string format_predictions_csv(const std::vector<CsTrace>& traces, const std::vector<std::string>& models,
                                   double pre, double window_width) {
  std::string out = "session_id,cs_id,highlighted,rel_time_s,ground_truth,masked";
  for (const auto& m : models) out += "," + m;
  out += "\n";
  for (const auto& t : traces)
    for (std::size_t k = 0; k < t.ground_truth.size(); ++k) {
      out += t.session_id + "," + std::to_string(t.cs_id) + "," + (t.highlighted ? "1" : "0") + "," +
             fmt("%.2f", -pre + static_cast<double>(k) * window_width) + "," + fmt("%.9f", t.ground_truth[k]) + "," +
             (t.masked[k] ? "1" : "0");
      for (const auto& m : models) out += "," + fmt("%.9f", t.predictions.at(m)[k]);
      out += "\n";
    }
  return out;
}

void export_report(const EvaluationReport& r, const std::filesystem::path& dir, const std::vector<CsTrace>* traces) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.json", to_json(r).dump(2) + "\n");
  write_file_atomic(dir / "curves.csv", format_curves_csv(r));
  if (traces) write_file_atomic(dir / "predictions.csv", format_predictions_csv(*traces, r.models, r.pre, r.window_width));
}

}  // namespace hism::eval
