#include "hism/app/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "hism/error.hpp"
#include "hism/eval/baselines.hpp"
#include "hism/gaze/aoi_metrics.hpp"
#include "hism/gaze/fixation.hpp"
#include "hism/gaze/gaze_io.hpp"
#include "hism/io.hpp"
#include "hism/model/dataset.hpp"
#include "hism/model/encode.hpp"
#include "hism/model/train.hpp"
#include "hism/nn/serialize.hpp"
#include "hism/random.hpp"
#include "hism/sim/responses.hpp"
#include "hism/sim/session_io.hpp"

namespace fs = std::filesystem;

namespace hism::app {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void require_workdir(const RunConfig& cfg) {
  if (cfg.workdir.empty()) throw CommandError(exit_code::config, "no workdir given (--workdir or HISM_WORKDIR)");
  if (!fs::is_directory(cfg.workdir))
    throw CommandError(exit_code::io, "workdir does not exist: " + cfg.workdir.string());
}

std::vector<fs::path> require_sessions(const RunConfig& cfg) {
  require_workdir(cfg);
  auto dirs = list_sessions(cfg.workdir);
  if (dirs.empty()) throw CommandError(exit_code::no_sessions, "no sessions found in " + sessions_dir(cfg.workdir).string());
  return dirs;
}

// Builds `final_dir` through a sibling temp directory; the old contents are
// replaced only once the new ones are complete.
template <class Fn>
void build_dir_atomically(const fs::path& final_dir, Fn&& fill) {
  fs::path tmp = final_dir;
  tmp += ".partial";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  try {
    fill(tmp);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  fs::path old = final_dir;
  old += ".old";
  fs::remove_all(old);
  if (fs::exists(final_dir)) fs::rename(final_dir, old);
  fs::rename(tmp, final_dir);
  fs::remove_all(old);
}

std::map<std::string, fs::path> sessions_by_id(const std::vector<fs::path>& dirs) {
  std::map<std::string, fs::path> out;
  for (const auto& d : dirs) out[d.filename().string()] = d;
  return out;
}

nlohmann::ordered_json split_json(const SessionSplit& s) {
  nlohmann::ordered_json j;
  j["train"] = s.train;
  j["val"] = s.val;
  j["test"] = s.test;
  return j;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
      return exit_code::config;
    case ErrorCode::io_failure:
    case ErrorCode::parse_error:
    case ErrorCode::non_monotonic_time:
    case ErrorCode::missing_frames:
    case ErrorCode::bad_magic:
    case ErrorCode::version_mismatch:
      return exit_code::io;
    default:
      return exit_code::failure;
  }
}

fs::path sessions_dir(const fs::path& workdir) { return workdir / "sessions"; }

std::string session_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "session_%04d", index);
  return buf;
}

std::vector<fs::path> list_sessions(const fs::path& workdir) {
  std::vector<fs::path> out;
  const fs::path dir = sessions_dir(workdir);
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && name.find('.') == std::string::npos && fs::exists(entry.path() / "session.json"))
      out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SimulatedSession simulate_session(const RunConfig& cfg, std::uint64_t seed, int index) {
  const std::uint64_t sseed = derive_seed(seed, static_cast<std::uint64_t>(index));
  SimulatedSession s;
  s.script = sim::schedule_session(cfg.schedule, scene::build_default_layout(), sseed);
  s.script.session_id = session_name(index);
  s.gaze = sim::simulate_gaze(s.script, cfg.behavior, derive_seed(sseed, 1));
  s.events = sim::simulate_responses(s.script, s.gaze, derive_seed(sseed, 2), cfg.idt);
  return s;
}

saliency::SaliencySeries compute_ground_truth(const sim::SessionScript& script,
                                              const std::vector<gaze::GazeSample>& gaze, double window_width) {
  return saliency::element_saliency(gaze, script.layout, window_width,
                                    saliency::windows_for_duration(script.duration, window_width));
}

saliency::SaliencySeries session_ground_truth(const fs::path& dir, const sim::SessionScript& script,
                                              const std::vector<gaze::GazeSample>* gaze) {
  if (fs::exists(dir / "saliency.csv")) return saliency::read_saliency_csv(dir / "saliency.csv");
  if (gaze) return compute_ground_truth(script, *gaze, 0.5);
  return compute_ground_truth(script, gaze::ingest_gaze_csv(dir / "gaze.csv"), 0.5);
}

SessionSplit split_sessions(std::vector<std::string> ids, std::uint64_t seed, const std::array<double, 3>& f) {
  std::sort(ids.begin(), ids.end());
  Rng rng(derive_seed(seed, 0x5917));
  rng.shuffle(ids);
  const auto n = static_cast<double>(ids.size());
  const auto n_val = static_cast<std::size_t>(std::lround(f[1] * n));
  const auto n_test = static_cast<std::size_t>(std::lround(f[2] * n));
  auto n_train = std::min(ids.size() - std::min(ids.size(), n_val + n_test),
                          static_cast<std::size_t>(std::lround(f[0] * n)));
  if (n_train == 0 && !ids.empty()) n_train = 1;
  SessionSplit s;
  std::size_t k = 0;
  for (; k < n_train && k < ids.size(); ++k) s.train.push_back(ids[k]);
  for (std::size_t i = 0; i < n_val && k < ids.size(); ++i, ++k) s.val.push_back(ids[k]);
  for (std::size_t i = 0; i < n_test && k < ids.size(); ++i, ++k) s.test.push_back(ids[k]);
  for (auto* v : {&s.train, &s.val, &s.test}) std::sort(v->begin(), v->end());
  return s;
}

AnalysisResult analyze_sessions(const std::vector<fs::path>& dirs, const RunConfig& cfg) {
  AnalysisResult res;
  for (const auto& dir : dirs) {
    const sim::SessionData data = sim::read_session(dir);
    const auto fixations = gaze::detect_fixations_idt(data.gaze, cfg.idt);
    for (const auto& cs : data.script.cs_list)
      res.metrics.push_back(gaze::aoi_metrics(fixations, data.script.cs_aoi(cs),
                                              {cs.cs_id, cs.onset_time, cs.highlighted}, cfg.horizon));
  }
  if (dirs.size() < 2) {
    res.insufficient_reason = "condition comparison needs at least two sessions";
    return res;
  }
  try {
    res.comparison = gaze::compare_conditions(res.metrics);
    res.comparison_available = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::insufficient_data) throw;
    res.insufficient_reason = e.message();
  }
  return res;
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  require_workdir(cfg);
  const std::uint64_t seed = cfg.require_seed();
  const fs::path root = sessions_dir(cfg.workdir);
  fs::create_directories(root);
  for (int i = 0; i < cfg.sessions; ++i) {
    const SimulatedSession s = simulate_session(cfg, seed, i);
    sim::Manifest manifest;
    build_dir_atomically(root / s.script.session_id, [&](const fs::path& tmp) {
      manifest = sim::write_session(tmp, s.script, s.gaze, s.events, cfg.write_frames);
    });
    log << s.script.session_id << " " << manifest.digest << "\n";
  }
}

AnalysisResult cmd_analyze(const RunConfig& cfg, std::ostream& log) {
  const auto dirs = require_sessions(cfg);
  AnalysisResult res = analyze_sessions(dirs, cfg);

  std::string csv =
      "session_id,cs_id,drone,channel,onset_s,condition,fixation_count,total_dwell_s,ttff_s,revisits,hit,"
      "response_time_s\n";
  std::size_t k = 0;
  for (const auto& dir : dirs) {
    const sim::SessionScript script = sim::read_session_script(dir);
    // First keypress per critical situation; keypresses without a cs_id
    // count for whichever situation is active.
    std::map<int, double> responses;
    for (const auto& e : sim::parse_events_jsonl(read_file(dir / "events.jsonl"))) {
      if (e.type != "keypress") continue;
      if (e.payload.contains("cs_id")) {
        responses.emplace(e.payload["cs_id"].get<int>(), e.t);
        continue;
      }
      for (const auto& cs : script.cs_list)
        if (cs.active_at(e.t)) responses.emplace(cs.cs_id, e.t);
    }
    for (const auto& cs : script.cs_list) {
      const auto& m = res.metrics[k++];
      const auto hit = responses.find(cs.cs_id);
      csv += dir.filename().string() + "," + std::to_string(cs.cs_id) + "," + std::to_string(cs.drone_index) + "," +
             cs.channel + "," + fmt("%.3f", cs.onset_time) + "," + (cs.highlighted ? "highlighted" : "plain") + "," +
             std::to_string(m.fixation_count) + "," + fmt("%.4f", m.total_dwell) + "," +
             (m.ttff ? fmt("%.4f", *m.ttff) : std::string()) + "," + std::to_string(m.revisits) + "," +
             (hit != responses.end() ? "1," + fmt("%.4f", hit->second - cs.onset_time) : std::string("0,")) + "\n";
    }
  }
  nlohmann::ordered_json comp;
  comp["sessions"] = dirs.size();
  comp["events"] = res.metrics.size();
  if (res.comparison_available) {
    comp["status"] = "ok";
    comp["comparison"] = gaze::to_json(res.comparison);
  } else {
    comp["status"] = "insufficient";
    comp["reason"] = res.insufficient_reason;
  }
  build_dir_atomically(cfg.workdir / "analysis", [&](const fs::path& tmp) {
    write_file(tmp / "metrics.csv", csv);
    write_file(tmp / "comparison.json", comp.dump(2) + "\n");
  });
  log << "analyzed " << dirs.size() << " sessions, " << res.metrics.size() << " critical situations\n";
  if (res.comparison_available) {
    const auto& t = res.comparison.metric("ttff");
    log << "ttff median highlighted " << fmt("%.3f", t.median_highlighted) << " s, plain "
        << fmt("%.3f", t.median_plain) << " s, p = " << fmt("%.3g", t.p_value) << "\n";
  } else {
    log << "comparison: " << res.insufficient_reason << "\n";
  }
  return res;
}

void cmd_groundtruth(const RunConfig& cfg, std::ostream& log) {
  const auto dirs = require_sessions(cfg);
  for (const auto& dir : dirs) {
    const sim::SessionScript script = sim::read_session_script(dir);
    const auto gaze = gaze::ingest_gaze_csv(dir / "gaze.csv");
    const auto series = compute_ground_truth(script, gaze, cfg.model.window_width);
    write_file_atomic(dir / "saliency.csv", saliency::format_saliency_csv(series, "ground_truth"));
  }
  log << "wrote ground truth for " << dirs.size() << " sessions\n";
}

namespace {

std::vector<model::TrainingExample> examples_for(const std::vector<std::string>& ids,
                                                 const std::map<std::string, fs::path>& by_id,
                                                 const model::HismConfig& mcfg, const model::HighlightClassifier& clf,
                                                 double pre, double post) {
  std::vector<std::vector<model::TrainingExample>> parts(ids.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const fs::path& dir = by_id.at(ids[i]);
    const sim::SessionScript script = sim::read_session_script(dir);
    const auto gt = session_ground_truth(dir, script);
    const sim::FrameSource frames = sim::FrameSource::for_session(dir, script);
    model::SessionFeatures features(script, frames, mcfg, clf);
    parts[i] = model::build_cs_examples(script, features, gt, pre, post);
  }
  std::vector<model::TrainingExample> out;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void cmd_train(const RunConfig& cfg, std::ostream& log) {
  const std::uint64_t seed = cfg.require_seed();
  const auto dirs = require_sessions(cfg);
  const auto by_id = sessions_by_id(dirs);
  std::vector<std::string> ids;
  for (const auto& [id, _] : by_id) ids.push_back(id);
  const SessionSplit split = split_sessions(ids, seed, cfg.split);
  const auto t0 = std::chrono::steady_clock::now();

  const sim::SessionScript first = sim::read_session_script(dirs.front());
  model::HighlightClassifier clf(cfg.model.crop_size);
  const auto crops = model::make_icon_crops(first.layout, cfg.classifier_crops_per_class, cfg.model.crop_size,
                                            cfg.model.crop_pad, derive_seed(seed, 0xC0));
  model::ClassifierTrainOptions copt = cfg.classifier;
  copt.seed = derive_seed(seed, 0xC1);
  const auto cres = model::train_highlight_classifier(clf, crops, copt);
  log << "classifier: held-out accuracy " << fmt("%.4f", cres.holdout_accuracy) << " after " << cres.epochs
      << " epochs\n";

  const auto train = examples_for(split.train, by_id, cfg.model, clf, cfg.eval_pre, cfg.eval_post);
  const auto val = examples_for(split.val, by_id, cfg.model, clf, cfg.eval_pre, cfg.eval_post);
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  log << "examples: " << train.size() << " train, " << val.size() << " val (" << fmt("%.1f", elapsed()) << " s)\n";

  model::TrainOptions topt = cfg.train;
  topt.seed = derive_seed(seed, 0x7A);
  const auto result = model::hism_train(cfg.model, train, val, topt, [&](const model::EpochRecord& r) {
    log << "epoch " << r.epoch << " train_mse " << fmt("%.6f", r.train_mse) << " val_mse " << fmt("%.6f", r.val_mse)
        << " (" << fmt("%.1f", elapsed()) << " s)\n";
    log.flush();
  });

  std::string history = "epoch,train_mse,val_mse\n";
  for (const auto& r : result.history)
    history += std::to_string(r.epoch) + "," + fmt("%.9f", r.train_mse) + "," + fmt("%.9f", r.val_mse) + "\n";
  nlohmann::ordered_json summary;
  summary["seed"] = seed;
  summary["classifier_holdout_accuracy"] = cres.holdout_accuracy;
  summary["classifier_epochs"] = cres.epochs;
  summary["train_examples"] = train.size();
  summary["val_examples"] = val.size();
  summary["best_epoch"] = result.best_epoch;
  summary["best_val_mse"] = result.best_val_mse;
  summary["split"] = split_json(split);

  build_dir_atomically(cfg.workdir / "model", [&](const fs::path& tmp) {
    nn::save_weights(result.params, tmp / "hism.bin");
    nn::save_weights(clf.params, tmp / "classifier.bin");
    write_file(tmp / "config.json", model::to_json(cfg.model).dump(2) + "\n");
    write_file(tmp / "loss_history.csv", history);
    write_file(tmp / "train_summary.json", summary.dump(2) + "\n");
  });
  log << "trained in " << fmt("%.1f", elapsed()) << " s, best epoch " << result.best_epoch << "\n";
}

eval::EvaluationReport cmd_eval(const RunConfig& cfg, std::ostream& log) {
  const auto dirs = require_sessions(cfg);
  const fs::path mdir = cfg.workdir / "model";
  if (!fs::exists(mdir / "hism.bin") || !fs::exists(mdir / "classifier.bin"))
    throw CommandError(exit_code::no_weights, "weights not found in " + mdir.string() + " (run train first)");
  const model::HismConfig mcfg = model::config_from_json(nlohmann::json::parse(read_file(mdir / "config.json")));
  const model::HismNetwork<float> net(mcfg);
  nn::ParameterStore<float> params = net.make_parameters(0);
  nn::assign_weights(params, nn::load_weights(mdir / "hism.bin"));
  model::HighlightClassifier clf(mcfg.crop_size);
  clf.init(0);
  nn::assign_weights(clf.params, nn::load_weights(mdir / "classifier.bin"));

  const auto summary = nlohmann::json::parse(read_file(mdir / "train_summary.json"));
  const auto test_ids = summary.at("split").at("test").get<std::vector<std::string>>();
  const auto by_id = sessions_by_id(dirs);
  for (const auto& id : test_ids)
    if (!by_id.count(id)) throw CommandError(exit_code::io, "test session " + id + " is missing");

  const std::vector<std::string> models{"hism", "center_bias", "static_saliency"};
  const double ww = mcfg.window_width;
  const int n_pre = static_cast<int>(std::lround(cfg.eval_pre / ww));
  const int n_post = static_cast<int>(std::lround(cfg.eval_post / ww));

  std::vector<std::vector<eval::CsTrace>> parts(test_ids.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < test_ids.size(); ++i) {
    const fs::path& dir = by_id.at(test_ids[i]);
    const sim::SessionScript script = sim::read_session_script(dir);
    const auto gt = session_ground_truth(dir, script);
    const sim::FrameSource frames = sim::FrameSource::for_session(dir, script);
    model::SessionFeatures features(script, frames, mcfg, clf);
    const auto center = eval::center_bias_baseline(script.layout);
    const auto spectral =
        eval::normalize_over_elements(eval::spectral_residual_saliency(frames.frame(0)), script.layout);
    for (const auto& cs : script.cs_list) {
      const auto aoi = model::aoi_for_element(script.layout, script.cs_icon_id(cs));
      const auto mask = model::aoi_mask(script.layout.canvas_width, script.layout.canvas_height, aoi.rect,
                                        mcfg.global_h, mcfg.global_w);
      eval::CsTrace t;
      t.session_id = script.session_id.empty() ? test_ids[i] : script.session_id;
      t.cs_id = cs.cs_id;
      t.highlighted = cs.highlighted;
      auto& ph = t.predictions["hism"];
      auto& pc = t.predictions["center_bias"];
      auto& ps = t.predictions["static_saliency"];
      const long onset_w = gt.window_index(cs.onset_time);
      for (long w = onset_w - n_pre; w < onset_w + n_post; ++w) {
        const bool inside = w >= 0 && w < gt.num_windows && w < features.num_windows();
        const int wi = static_cast<int>(w);
        t.ground_truth.push_back(inside ? gt.at(wi, aoi.icon_id) + gt.at(wi, aoi.parameter_id) : 0.0);
        t.masked.push_back(!inside || gt.is_masked(wi) ? 1 : 0);
        if (inside) {
          const auto hv = features.hvec(wi, aoi.icon_id);
          const auto rgb = features.rgb(wi);
          ph.push_back(net.forward(params, model::stack_global(*rgb, mask, mcfg.global_h, mcfg.global_w), hv));
        } else {
          ph.push_back(0.0);
        }
        pc.push_back(center[aoi.icon_id] + center[aoi.parameter_id]);
        ps.push_back(spectral[aoi.icon_id] + spectral[aoi.parameter_id]);
      }
      parts[i].push_back(std::move(t));
    }
  }
  std::vector<eval::CsTrace> traces;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(traces));
  const eval::EvaluationReport report = eval::evaluate(traces, models, cfg.eval_pre, ww);

  build_dir_atomically(cfg.workdir / "eval", [&](const fs::path& tmp) { eval::export_report(report, tmp, &traces); });
  for (const auto& s : report.scores) log << s.model << " mse " << fmt("%.6f", s.mse) << "\n";
  log << report.window_count << " test windows over " << test_ids.size() << " sessions\n";
  return report;
}

}  // namespace hism::app
