#include "hism/app/config.hpp"

#include "hism/error.hpp"
#include "hism/io.hpp"

namespace hism::app {

void RunConfig::validate() const {
  if (sessions < 1) throw Error(ErrorCode::invalid_argument, "sessions must be >= 1");
  if (!(schedule.highlight_prob >= 0.0 && schedule.highlight_prob <= 1.0))
    throw Error(ErrorCode::invalid_argument, "highlight probability must lie in [0, 1]");
  if (!(schedule.duration > 0) || !(schedule.frame_rate > 0))
    throw Error(ErrorCode::invalid_argument, "duration and frame rate must be positive");
  if (split[0] <= 0 || split[1] < 0 || split[2] < 0 || split[0] + split[1] + split[2] > 1.0 + 1e-9)
    throw Error(ErrorCode::invalid_argument, "split fractions must be non-negative and sum to <= 1");
  if (port < 0 || port > 65535) throw Error(ErrorCode::invalid_argument, "port out of range");
  if (train.max_epochs < 1 || train.batch < 1) throw Error(ErrorCode::invalid_argument, "epochs and batch must be >= 1");
  behavior.validate();
  model.validate();
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw Error(ErrorCode::invalid_argument, "a seed is required (--seed or \"seed\" in the config)");
  return *seed;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "config must be a JSON object");
    if (j.contains("workdir")) c.workdir = j["workdir"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    c.sessions = j.value("sessions", c.sessions);
    c.write_frames = j.value("write_frames", c.write_frames);
    if (j.contains("schedule")) c.schedule = sim::schedule_params_from_json(j["schedule"]);
    if (j.contains("behavior")) c.behavior = sim::behavior_from_json(j["behavior"]);
    if (j.contains("idt")) {
      c.idt.dispersion_threshold = j["idt"].value("dispersion_px", c.idt.dispersion_threshold);
      c.idt.min_duration = j["idt"].value("min_duration_s", c.idt.min_duration);
    }
    c.horizon = j.value("horizon_s", c.horizon);
    if (j.contains("model")) c.model = model::config_from_json(j["model"]);
    if (j.contains("train")) {
      const auto& t = j["train"];
      c.train.max_epochs = t.value("epochs", c.train.max_epochs);
      c.train.batch = t.value("batch", c.train.batch);
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.patience = t.value("patience", c.train.patience);
      if (t.contains("split")) c.split = t["split"].get<std::array<double, 3>>();
    }
    if (j.contains("classifier")) {
      const auto& t = j["classifier"];
      c.classifier_crops_per_class = t.value("crops_per_class", c.classifier_crops_per_class);
      c.classifier.max_epochs = t.value("max_epochs", c.classifier.max_epochs);
      c.classifier.learning_rate = t.value("learning_rate", c.classifier.learning_rate);
    }
    if (j.contains("eval")) {
      c.eval_pre = j["eval"].value("pre_s", c.eval_pre);
      c.eval_post = j["eval"].value("post_s", c.eval_post);
    }
    if (j.contains("serve")) {
      c.port = j["serve"].value("port", c.port);
      if (j["serve"].contains("ui_dir")) c.ui_dir = j["serve"]["ui_dir"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["workdir"] = c.workdir.string();
  if (c.seed) j["seed"] = *c.seed;
  j["sessions"] = c.sessions;
  j["write_frames"] = c.write_frames;
  j["schedule"] = sim::to_json(c.schedule);
  j["behavior"] = sim::to_json(c.behavior);
  j["idt"] = {{"dispersion_px", c.idt.dispersion_threshold}, {"min_duration_s", c.idt.min_duration}};
  j["horizon_s"] = c.horizon;
  j["model"] = model::to_json(c.model);
  j["train"] = {{"epochs", c.train.max_epochs},
                {"batch", c.train.batch},
                {"learning_rate", c.train.learning_rate},
                {"patience", c.train.patience},
                {"split", c.split}};
  j["classifier"] = {{"crops_per_class", c.classifier_crops_per_class},
                     {"max_epochs", c.classifier.max_epochs},
                     {"learning_rate", c.classifier.learning_rate}};
  j["eval"] = {{"pre_s", c.eval_pre}, {"post_s", c.eval_post}};
  j["serve"] = {{"port", c.port}, {"ui_dir", c.ui_dir.string()}};
  return j;
}

}  // namespace hism::app
