#pragma once

#include "oneshot/rng.hpp"
#include "oneshot/types.hpp"

namespace oneshot {

/// Sampling ranges for the shape-tweak family. Defaults: rotate 20 deg,
/// stretch 0.20, translate 0.025, perspective 0.12, flip probability 0.5.
struct ShapeTweakRanges {
  double rotate_max_deg = 20.0;
  double stretch_max = 0.20;
  double translate_max = 0.025;
  double persp_max = 0.12;
  double hflip_prob = 0.5;
};

struct ShapeTweakParams {
  double rotate_deg = 0.0;
  double stretch_x = 1.0;
  double stretch_y = 1.0;
  double translate_x = 0.0;  // fraction of width
  double translate_y = 0.0;  // fraction of height
  double persp_jitter = 0.0;  // corner-displacement fraction, keystone warp
  bool hflip = false;
};

/// Uniform draw in each symmetric range; persp_jitter uniform in [0, persp_max];
/// hflip Bernoulli(hflip_prob).
ShapeTweakParams sample_tweak(const ShapeTweakRanges& ranges, Rng& rng);

/// Composes hflip -> stretch -> rotate about center -> translate -> projective
/// corner jitter, inverse-mapped with bilinear interpolation. Out-of-bounds
/// samples fill with the source border mean.
RasterImage apply_tweak(const RasterImage& x, const ShapeTweakParams& psi);

double border_mean(const RasterImage& x);

}  // namespace oneshot
