#pragma once

#include "oneshot/conditioning.hpp"
#include "oneshot/diffusion.hpp"
#include "oneshot/geometry.hpp"
#include "oneshot/schedule.hpp"

#include <vector>

namespace oneshot {

struct SigmaPolicy {
  bool stochastic = false;
  double scale = 0.0;  // sigma_t = scale * sqrt(beta_t) when stochastic

  double sigma(const VarianceSchedule& schedule, int t) const;
};

/// Hyperparameters of the one-shot augmentation operator: geometric ranges,
/// noise level, conditioning weight, sampler noise policy, and variant count.
struct AugConfig {
  ShapeTweakRanges ranges;
  double eta = 0.7;
  double lambda_img = 0.8;
  SigmaPolicy sigma;
  int variants = 2;
};

struct VariantLog {
  ShapeTweakParams psi;
  int start_time = 0;
};

/// View stack for one image: view 0 is always the unmodified original.
struct AugmentedSet {
  RasterImage original;
  std::vector<RasterImage> variants;
  std::vector<VariantLog> params_log;

  int view_count() const { return 1 + static_cast<int>(variants.size()); }
  const RasterImage& view(int k) const { return k == 0 ? original : variants[k - 1]; }
};

/// One pass of the three-stage operator: shape tweak, forward noising to the
/// start time matched to eta, then a reverse rollout conditioned on the
/// original image. At eta == 0 no noise is drawn (the matched cumulative
/// noise is 0, below what step 1 can represent) and a single near-identity
/// denoise runs on the tweaked image.
RasterImage augment_once(const RasterImage& x, const AugConfig& cfg, const GmmWorld& world,
                         const VarianceSchedule& schedule, Rng& rng, VariantLog* log = nullptr);

/// cfg.variants independent passes, each with fresh tweak and fresh noise.
AugmentedSet augment_set(const RasterImage& x, const AugConfig& cfg, const GmmWorld& world,
                         const VarianceSchedule& schedule, Rng& rng);

}  // namespace oneshot
