#pragma once

#include "oneshot/attention.hpp"
#include "oneshot/diffusion.hpp"
#include "oneshot/types.hpp"

#include <optional>

namespace oneshot {

struct ConditioningConfig {
  double lambda_img = 0.8;
  std::optional<RasterImage> condition_image;
  TokenMatrix text_tokens = TokenMatrix(0, 0);
};

/// Tempered posterior over components: log pi_k + lambda * log L_k(cond),
/// renormalized in log space. L_k is the component likelihood of the
/// condition image under the world.
VectorXd tempered_log_prior(const GmmWorld& world, const RasterImage& condition, double lambda_img);

/// Image-conditioned denoiser: the component prior of the mixture score is
/// reweighted by the tempered posterior of the condition image. lambda_img = 0
/// recovers the unconditional predictor exactly; large lambda_img locks onto
/// the condition's most likely component.
NoisePrediction conditioned_eps_predictor(const VarianceSchedule& schedule, const GmmWorld& world,
                                          const RasterImage& x_t, int t,
                                          const ConditioningConfig& cfg);

}  // namespace oneshot
