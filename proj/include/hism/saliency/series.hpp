#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hism/gaze/types.hpp"
#include "hism/scene/layout.hpp"

namespace hism::saliency {

/// Per-window, per-element share of on-element gaze. Rows of non-masked
/// windows sum to one; masked (empty) windows are all zero.
struct SaliencySeries {
  double window_width = 0.5;
  double t0 = 0.0;
  int num_windows = 0;
  int num_elements = 0;
  std::vector<double> weights;       // [window][element]
  std::vector<std::uint8_t> masked;  // per window

  SaliencySeries() = default;
  SaliencySeries(double width, double start, int windows, int elements);

  double& at(int w, int e) { return weights[static_cast<std::size_t>(w) * num_elements + e]; }
  double at(int w, int e) const { return weights[static_cast<std::size_t>(w) * num_elements + e]; }
  bool is_masked(int w) const { return masked[static_cast<std::size_t>(w)] != 0; }
  double window_start(int w) const { return t0 + w * window_width; }
  /// Index of the window containing t (may be out of range).
  long window_index(double t) const;

  friend bool operator==(const SaliencySeries&, const SaliencySeries&) = default;
};

/// Number of windows needed to cover [0, duration).
int windows_for_duration(double duration, double window_width);

/// Ground truth from raw gaze samples. `num_windows` defaults to covering the
/// last sample.
SaliencySeries element_saliency(std::span<const gaze::GazeSample> samples, const scene::InterfaceLayout& layout,
                                double window_width = 0.5, std::optional<int> num_windows = std::nullopt);

/// Variant weighting each element by fixation time overlapping the window.
SaliencySeries element_saliency_from_fixations(std::span<const gaze::Fixation> fixations,
                                               const scene::InterfaceLayout& layout, double window_width,
                                               int num_windows);

/// Mean over non-masked contributors per window, renormalized.
SaliencySeries pool_series(std::span<const SaliencySeries> series);

/// Event-relative view over [-pre, +post): the window containing event_time
/// becomes relative time 0. Windows outside the source are masked.
SaliencySeries align_to_event(const SaliencySeries& series, double event_time, double pre, double post);

struct ElementCurve {
  double t0 = 0.0;
  double window_width = 0.5;
  std::vector<double> values;
  std::vector<std::uint8_t> masked;
};

ElementCurve extract_element_curve(const SaliencySeries& series, int element_id);
/// Sum of several element columns, e.g. an icon and its parameter field.
ElementCurve extract_aoi_curve(const SaliencySeries& series, std::span<const int> element_ids);

/// saliency.csv: `window_start_s,element_id,weight,masked` (+ `source` if given).
std::string format_saliency_csv(const SaliencySeries& series, const std::string& source = {});
void write_saliency_csv(const std::filesystem::path& path, const SaliencySeries& series,
                        const std::string& source = {});
SaliencySeries read_saliency_csv(const std::filesystem::path& path);

}  // namespace hism::saliency
