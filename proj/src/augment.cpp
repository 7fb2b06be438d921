#include "oneshot/augment.hpp"

#include <cmath>
#include <stdexcept>

namespace oneshot {

double SigmaPolicy::sigma(const VarianceSchedule& schedule, int t) const {
  if (!stochastic) return 0.0;
  return scale * std::sqrt(schedule.beta(t));
}

RasterImage augment_once(const RasterImage& x, const AugConfig& cfg, const GmmWorld& world,
                         const VarianceSchedule& schedule, Rng& rng, VariantLog* log) {
  if (cfg.lambda_img < 0.0) throw std::invalid_argument("augment_once: lambda_img must be >= 0");
  const NoiseLevel eta(cfg.eta);

  const ShapeTweakParams psi = sample_tweak(cfg.ranges, rng);
  const RasterImage x_geom = apply_tweak(x, psi);

  const int t0 = eta_to_start_time(schedule, eta);
  if (log) {
    log->psi = psi;
    log->start_time = t0;
  }

  RasterImage z;
  if (eta.value == 0.0) {
    z = x_geom;
  } else {
    z = forward_noise(schedule, x_geom, t0, rng).x_t;
  }

  // The condition is the original image, not the tweaked one.
  VectorXd log_prior = cfg.lambda_img > 0.0 ? tempered_log_prior(world, x, cfg.lambda_img)
                                            : world.uniform_log_prior();
  for (int t = t0; t >= 1; --t) {
    const NoisePrediction eps_hat = gmm_eps_predictor(schedule, world, z, t, log_prior);
    z = reverse_step(schedule, z, t, eps_hat, cfg.sigma.sigma(schedule, t), rng);
  }
  return z;
}

AugmentedSet augment_set(const RasterImage& x, const AugConfig& cfg, const GmmWorld& world,
                         const VarianceSchedule& schedule, Rng& rng) {
  if (cfg.variants < 0) throw std::invalid_argument("augment_set: variant count must be >= 0");
  AugmentedSet out;
  out.original = x;
  out.variants.reserve(cfg.variants);
  out.params_log.reserve(cfg.variants);
  for (int k = 0; k < cfg.variants; ++k) {
    VariantLog log;
    out.variants.push_back(augment_once(x, cfg, world, schedule, rng, &log));
    out.params_log.push_back(log);
  }
  return out;
}

}  // namespace oneshot
