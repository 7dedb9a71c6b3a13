#pragma once

#include <vector>

#include "hism/scene/layout.hpp"
#include "hism/scene/raster.hpp"

namespace hism::eval {

/// Mass of an isotropic Gaussian centred on the canvas (sigma = width *
/// sigma_fraction) over each element rect, normalized to sum 1.
std::vector<double> center_bias_baseline(const scene::InterfaceLayout& layout, double sigma_fraction = 0.25);

struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, non-negative
};

struct SpectralParams {
  int size = 64;
  double blur_sigma = 2.5;
};

/// Spectral-residual saliency of the grayscale frame at size x size. A flat
/// frame yields an all-zero map.
SaliencyMap spectral_residual_saliency(const scene::FrameRaster& frame, const SpectralParams& params = {});

/// Element weight = mean map value over the element's footprint (area
/// weighted), normalized to sum 1; uniform when the map carries no mass.
std::vector<double> normalize_over_elements(const SaliencyMap& map, const scene::InterfaceLayout& layout);

}  // namespace hism::eval
