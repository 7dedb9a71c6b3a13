#include "hism/model/dataset.hpp"

#include <cmath>

#include "hism/error.hpp"
#include "hism/model/encode.hpp"

namespace hism::model {

SessionFeatures::SessionFeatures(const sim::SessionScript& script, const sim::FrameSource& frames,
                                 const HismConfig& cfg, const HighlightClassifier& classifier)
    : script_(&script),
      frames_(&frames),
      cfg_(&cfg),
      clf_(&classifier),
      num_windows_(saliency::windows_for_duration(script.duration, cfg.window_width)) {}

const scene::FrameRaster& SessionFeatures::frame(int window) {
  if (window != frame_window_) {
    const int idx = std::min(window_middle_frame(window, cfg_->window_width, frames_->frame_rate()),
                             frames_->frame_count() - 1);
    frame_ = frames_->frame(idx);
    frame_window_ = window;
  }
  return frame_;
}

std::shared_ptr<const std::vector<float>> SessionFeatures::rgb(int window) {
  auto it = rgb_.find(window);
  if (it != rgb_.end()) return it->second;
  auto v = std::make_shared<const std::vector<float>>(downsample_rgb(frame(window), cfg_->global_h, cfg_->global_w));
  rgb_.emplace(window, v);
  return v;
}

std::uint8_t SessionFeatures::highlight_bit(int window, int icon_id) {
  const auto key = std::make_pair(window, icon_id);
  auto it = bits_.find(key);
  if (it != bits_.end()) return it->second;
  const auto& rect = script_->layout.element(icon_id).rect;
  const auto crop = crop_tensor(frame(window), rect, cfg_->crop_size, cfg_->crop_pad);
  const std::uint8_t bit = clf_->score(crop) > 0.5f ? 1 : 0;
  bits_.emplace(key, bit);
  return bit;
}

std::vector<float> SessionFeatures::hvec(int window, int icon_id) {
  std::vector<float> out;
  for (const int w : history_windows(window, cfg_->history_len)) out.push_back(highlight_bit(w, icon_id));
  return out;
}

AoiRef aoi_for_element(const scene::InterfaceLayout& layout, int element_id) {
  if (element_id < 0 || element_id >= static_cast<int>(layout.elements.size()))
    throw Error(ErrorCode::unknown_element, "element " + std::to_string(element_id));
  const auto& e = layout.element(element_id);
  const int c = layout.channel_index(e.channel);
  return {layout.icon(e.drone_index, c).id, layout.parameter(e.drone_index, c).id,
          layout.aoi_rect(e.drone_index, c)};
}

std::vector<TrainingExample> build_cs_examples(const sim::SessionScript& script, SessionFeatures& features,
                                               const saliency::SaliencySeries& gt, double pre, double post) {
  std::vector<TrainingExample> out;
  const double ww = gt.window_width;
  const int n_pre = static_cast<int>(std::lround(pre / ww));
  const int n_post = static_cast<int>(std::lround(post / ww));
  for (const auto& cs : script.cs_list) {
    const AoiRef aoi = aoi_for_element(script.layout, script.cs_icon_id(cs));
    const long onset_w = gt.window_index(cs.onset_time);
    for (long w = onset_w - n_pre; w < onset_w + n_post; ++w) {
      if (w < 0 || w >= gt.num_windows || w >= features.num_windows() || gt.is_masked(static_cast<int>(w)))
        continue;
      const int wi = static_cast<int>(w);
      TrainingExample ex;
      ex.hvec = features.hvec(wi, aoi.icon_id);
      ex.rgb = features.rgb(wi);
      ex.aoi = aoi.rect;
      ex.frame_w = script.layout.canvas_width;
      ex.frame_h = script.layout.canvas_height;
      ex.target = static_cast<float>(gt.at(wi, aoi.icon_id) + gt.at(wi, aoi.parameter_id));
      ex.session_id = script.session_id;
      ex.cs_id = cs.cs_id;
      ex.window = wi;
      ex.rel_time = (w - onset_w) * ww;
      ex.highlighted = cs.highlighted;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace hism::model
