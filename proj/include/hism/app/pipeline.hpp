#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hism/app/config.hpp"
#include "hism/eval/report.hpp"
#include "hism/gaze/compare.hpp"
#include "hism/gaze/types.hpp"
#include "hism/saliency/series.hpp"
#include "hism/sim/events.hpp"
#include "hism/sim/session.hpp"

namespace hism::app {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config = 2;
inline constexpr int io = 3;
inline constexpr int no_sessions = 4;
inline constexpr int no_weights = 5;
}  // namespace exit_code

/// Failure carrying the process exit code.
class CommandError : public std::runtime_error {
 public:
  CommandError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int exit_code() const noexcept { return code_; }

 private:
  int code_;
};

int exit_code_for(ErrorCode code);

std::filesystem::path sessions_dir(const std::filesystem::path& workdir);
std::string session_name(int index);
/// Session directories under the workdir, sorted by name.
std::vector<std::filesystem::path> list_sessions(const std::filesystem::path& workdir);

struct SimulatedSession {
  sim::SessionScript script;
  std::vector<gaze::GazeSample> gaze;
  sim::EventLog events;
};

/// Session `index` of a batch: script, gaze and responses from streams derived
/// from (seed, index).
SimulatedSession simulate_session(const RunConfig& cfg, std::uint64_t seed, int index);

/// Ground truth of a session: saliency.csv when present, else computed from gaze.
saliency::SaliencySeries session_ground_truth(const std::filesystem::path& dir, const sim::SessionScript& script,
                                              const std::vector<gaze::GazeSample>* gaze = nullptr);
saliency::SaliencySeries compute_ground_truth(const sim::SessionScript& script,
                                              const std::vector<gaze::GazeSample>& gaze, double window_width);

struct SessionSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

/// Seeded shuffle of whole sessions into train/val/test.
SessionSplit split_sessions(std::vector<std::string> ids, std::uint64_t seed, const std::array<double, 3>& fractions);

struct AnalysisResult {
  std::vector<gaze::AoiMetrics> metrics;
  bool comparison_available = false;
  gaze::ConditionComparison comparison;
  std::string insufficient_reason;
};

/// Per-CS AOI metrics of every session plus the condition comparison.
/// Comparisons need at least two sessions.
AnalysisResult analyze_sessions(const std::vector<std::filesystem::path>& dirs, const RunConfig& cfg);

void cmd_simulate(const RunConfig& cfg, std::ostream& log);
AnalysisResult cmd_analyze(const RunConfig& cfg, std::ostream& log);
void cmd_groundtruth(const RunConfig& cfg, std::ostream& log);
void cmd_train(const RunConfig& cfg, std::ostream& log);
eval::EvaluationReport cmd_eval(const RunConfig& cfg, std::ostream& log);

}  // namespace hism::app
