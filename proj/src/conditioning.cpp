#include "oneshot/conditioning.hpp"

#include <cmath>
#include <stdexcept>

namespace oneshot {

VectorXd tempered_log_prior(const GmmWorld& world, const RasterImage& condition,
                            double lambda_img) {
  if (lambda_img < 0.0) throw std::invalid_argument("tempered_log_prior: lambda_img must be >= 0");
  VectorXd logw = world.uniform_log_prior();
  if (lambda_img > 0.0)
    logw += lambda_img * world.component_log_likelihood(condition.pixels);
  const double m = logw.maxCoeff();
  const double lse = m + std::log((logw.array() - m).exp().sum());
  return logw.array() - lse;
}

NoisePrediction conditioned_eps_predictor(const VarianceSchedule& schedule, const GmmWorld& world,
                                          const RasterImage& x_t, int t,
                                          const ConditioningConfig& cfg) {
  if (!cfg.condition_image.has_value() || cfg.lambda_img == 0.0)
    return gmm_eps_predictor(schedule, world, x_t, t);
  return gmm_eps_predictor(schedule, world, x_t, t,
                           tempered_log_prior(world, *cfg.condition_image, cfg.lambda_img));
}

}  // namespace oneshot
