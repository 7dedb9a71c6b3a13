#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hism/model/classifier.hpp"
#include "hism/model/config.hpp"
#include "hism/saliency/series.hpp"
#include "hism/scene/raster.hpp"
#include "hism/sim/session.hpp"
#include "hism/sim/session_io.hpp"

namespace hism::model {

/// Per-window model inputs for one session, computed lazily from frames.
/// Windows are best visited in increasing order (one rendered frame is kept).
class SessionFeatures {
 public:
  SessionFeatures(const sim::SessionScript& script, const sim::FrameSource& frames, const HismConfig& cfg,
                  const HighlightClassifier& classifier);

  int num_windows() const { return num_windows_; }
  std::shared_ptr<const std::vector<float>> rgb(int window);
  std::uint8_t highlight_bit(int window, int icon_id);
  /// K bits ending at `window`, oldest first, front-padded with window 0.
  std::vector<float> hvec(int window, int icon_id);

 private:
  const scene::FrameRaster& frame(int window);

  const sim::SessionScript* script_;
  const sim::FrameSource* frames_;
  const HismConfig* cfg_;
  const HighlightClassifier* clf_;
  int num_windows_ = 0;
  int frame_window_ = -1;
  scene::FrameRaster frame_;
  std::map<int, std::shared_ptr<const std::vector<float>>> rgb_;
  std::map<std::pair<int, int>, std::uint8_t> bits_;
};

struct TrainingExample {
  std::shared_ptr<const std::vector<float>> rgb;  // [3 x H x W]
  scene::Rect aoi;
  int frame_w = 0;
  int frame_h = 0;
  std::vector<float> hvec;
  float target = 0.0f;

  std::string session_id;
  int cs_id = 0;
  int window = 0;
  double rel_time = 0.0;
  bool highlighted = false;
};

/// Icon element and AOI rect for any element of an AOI.
struct AoiRef {
  int icon_id = 0;
  int parameter_id = 0;
  scene::Rect rect;
};
AoiRef aoi_for_element(const scene::InterfaceLayout& layout, int element_id);

/// Windows [-pre, +post) around each CS onset with a non-masked ground truth;
/// the target is the summed weight of the AOI's icon and parameter.
std::vector<TrainingExample> build_cs_examples(const sim::SessionScript& script, SessionFeatures& features,
                                               const saliency::SaliencySeries& ground_truth,
                                               double pre = 5.0, double post = 10.0);

}  // namespace hism::model
