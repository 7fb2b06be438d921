#pragma once

#include "oneshot/rng.hpp"
#include "oneshot/schedule.hpp"
#include "oneshot/types.hpp"
#include "oneshot/world.hpp"

namespace oneshot {

struct NoisePrediction {
  ArrayXd epsilon_hat;
};

struct ForwardNoiseResult {
  RasterImage x_t;
  ArrayXd eps;
};

/// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps, eps ~ N(0, I).
/// Returns both the noised image and the drawn noise.
ForwardNoiseResult forward_noise(const VarianceSchedule& schedule, const RasterImage& x0, int t,
                                 Rng& rng);

/// x_{t-1} = alpha_t^{-1/2} (x_t - (1-alpha_t)/sqrt(1-alpha_bar_t) eps_hat) + sigma_t eps.
/// Deterministic when sigma_t == 0.
RasterImage reverse_step(const VarianceSchedule& schedule, const RasterImage& x_t, int t,
                         const NoisePrediction& eps_hat, double sigma_t, Rng& rng);

/// Exact noise under the hypothesis that the clean image is x0:
/// eps = (x_t - sqrt(alpha_bar_t) x0) / sqrt(1 - alpha_bar_t).
NoisePrediction pointmass_eps_predictor(const VarianceSchedule& schedule, const RasterImage& x_t,
                                        int t, const RasterImage& x0);

/// Exact unconditional predictor for the GmmWorld marginal:
/// eps = -sqrt(1 - alpha_bar_t) * grad log p_t(x_t), where p_t is the mixture
/// with means sqrt(alpha_bar_t) mu_k and isotropic variance
/// alpha_bar_t s^2 + (1 - alpha_bar_t). Responsibilities are computed in log
/// space.
NoisePrediction gmm_eps_predictor(const VarianceSchedule& schedule, const GmmWorld& world,
                                  const RasterImage& x_t, int t);

/// Same, with caller-supplied component log prior (normalization optional).
NoisePrediction gmm_eps_predictor(const VarianceSchedule& schedule, const GmmWorld& world,
                                  const RasterImage& x_t, int t, const VectorXd& log_prior);

/// log p_t(x) of the mixture marginal up to the Gaussian normalizer shared by
/// all components; exposed for finite-difference checks of the score.
double gmm_marginal_log_density(const VarianceSchedule& schedule, const GmmWorld& world,
                                const ArrayXd& x, int t, const VectorXd& log_prior);

}  // namespace oneshot
