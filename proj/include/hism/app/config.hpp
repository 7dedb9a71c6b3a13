#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hism/gaze/fixation.hpp"
#include "hism/model/classifier.hpp"
#include "hism/model/config.hpp"
#include "hism/model/train.hpp"
#include "hism/sim/behavior.hpp"
#include "hism/sim/session.hpp"

namespace hism::app {

struct RunConfig {
  std::filesystem::path workdir;
  std::optional<std::uint64_t> seed;
  int sessions = 40;
  bool write_frames = false;
  sim::ScheduleParams schedule;
  sim::BehaviorParams behavior;
  gaze::IdtParams idt;
  double horizon = 10.0;
  model::HismConfig model = model::default_config();
  model::TrainOptions train;
  std::array<double, 3> split{0.70, 0.15, 0.15};
  int classifier_crops_per_class = 500;
  model::ClassifierTrainOptions classifier;
  double eval_pre = 5.0;
  double eval_post = 10.0;
  int port = 8080;
  std::filesystem::path ui_dir;

  /// Throws InvalidArgument.
  void validate() const;
  std::uint64_t require_seed() const;
};

/// Missing keys keep their defaults. Throws InvalidArgument on malformed input.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const RunConfig& c);

}  // namespace hism::app
