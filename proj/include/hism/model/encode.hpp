#pragma once

#include <vector>

#include "hism/nn/tensor.hpp"
#include "hism/scene/layout.hpp"
#include "hism/scene/raster.hpp"

namespace hism::model {

/// Area-averaged RGB of the whole frame at (h, w), scaled to [0,1]: [3 x h x w].
std::vector<float> downsample_rgb(const scene::FrameRaster& frame, int h, int w);

/// 1 where a downsampled pixel's footprint overlaps the rect: [h x w].
std::vector<float> aoi_mask(int frame_w, int frame_h, const scene::Rect& aoi, int h, int w);

/// [4 x h x w]: downsampled RGB plus AOI mask.
nn::Tensor<float> encode_global(const scene::FrameRaster& frame, const scene::Rect& aoi, int h, int w);
nn::Tensor<float> stack_global(const std::vector<float>& rgb, const std::vector<float>& mask, int h, int w);

/// Padded crop of rect resized to size x size, scaled to [0,1]: [3 x size x size].
nn::Tensor<float> crop_tensor(const scene::FrameRaster& frame, const scene::Rect& rect, int size, int pad);

/// One crop per frame, oldest first.
std::vector<nn::Tensor<float>> encode_local_sequence(const std::vector<scene::FrameRaster>& frames,
                                                     const scene::Rect& rect, int size, int pad);

/// Index of the frame at the middle of a window.
int window_middle_frame(int window, double window_width, double frame_rate);

/// The K windows ending at `window`, oldest first; indices before the session
/// start repeat window 0.
std::vector<int> history_windows(int window, int k);

}  // namespace hism::model
