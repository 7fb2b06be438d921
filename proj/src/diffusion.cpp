#include "oneshot/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace oneshot {

namespace {

constexpr double kVarianceFloor = 1e-12;

void check_image(const VarianceSchedule& schedule, const RasterImage& img, int t) {
  if (t < 1 || t > schedule.steps()) throw std::out_of_range("diffusion: step out of range");
  if (img.pixels.size() != static_cast<long>(img.width) * img.height)
    throw std::invalid_argument("diffusion: malformed image");
}

// Log-space responsibilities and the resulting posterior-weighted template mean.
ArrayXd gmm_epsilon(const GmmWorld& world, const ArrayXd& x, double alpha_bar,
                    const VectorXd& log_prior) {
  if (log_prior.size() != world.class_count())
    throw std::invalid_argument("gmm_eps_predictor: prior size mismatch");
  const double s = world.within_class_std();
  const double var = std::max(alpha_bar * s * s + (1.0 - alpha_bar), kVarianceFloor);
  const double root_ab = std::sqrt(alpha_bar);

  const VectorXd cross = world.templates() * x.matrix();
  const double x_sq = x.matrix().squaredNorm();
  VectorXd logw(world.class_count());
  for (int k = 0; k < world.class_count(); ++k) {
    const double sq_dist =
        x_sq - 2.0 * root_ab * cross[k] + alpha_bar * world.template_sq_norms()[k];
    logw[k] = log_prior[k] - sq_dist / (2.0 * var);
  }
  const double m = logw.maxCoeff();
  VectorXd w = (logw.array() - m).exp();
  w /= w.sum();

  const VectorXd mean = world.templates().transpose() * w;
  // score = (sqrt(ab) * posterior mean - x) / var; eps = -sqrt(1-ab) * score
  return std::sqrt(1.0 - alpha_bar) * (x - root_ab * mean.array()) / var;
}

}  // namespace

ForwardNoiseResult forward_noise(const VarianceSchedule& schedule, const RasterImage& x0, int t,
                                 Rng& rng) {
  check_image(schedule, x0, t);
  const double ab = schedule.alpha_bar(t);
  ForwardNoiseResult out;
  out.eps = normal_array(x0.pixels.size(), rng);
  out.x_t = RasterImage(x0.width, x0.height,
                        std::sqrt(ab) * x0.pixels + std::sqrt(1.0 - ab) * out.eps);
  return out;
}

RasterImage reverse_step(const VarianceSchedule& schedule, const RasterImage& x_t, int t,
                         const NoisePrediction& eps_hat, double sigma_t, Rng& rng) {
  check_image(schedule, x_t, t);
  if (eps_hat.epsilon_hat.size() != x_t.pixels.size())
    throw std::invalid_argument("reverse_step: prediction size mismatch");
  if (sigma_t < 0.0) throw std::invalid_argument("reverse_step: sigma_t must be >= 0");
  const double a = schedule.alpha(t);
  const double ab = schedule.alpha_bar(t);
  ArrayXd mean =
      (x_t.pixels - ((1.0 - a) / std::sqrt(1.0 - ab)) * eps_hat.epsilon_hat) / std::sqrt(a);
  if (sigma_t > 0.0) mean += sigma_t * normal_array(x_t.pixels.size(), rng);
  return RasterImage(x_t.width, x_t.height, std::move(mean));
}

NoisePrediction pointmass_eps_predictor(const VarianceSchedule& schedule, const RasterImage& x_t,
                                        int t, const RasterImage& x0) {
  check_image(schedule, x_t, t);
  const double ab = schedule.alpha_bar(t);
  if (1.0 - ab < kVarianceFloor)
    throw std::invalid_argument("pointmass_eps_predictor: 1 - alpha_bar below floor");
  return NoisePrediction{(x_t.pixels - std::sqrt(ab) * x0.pixels) / std::sqrt(1.0 - ab)};
}

NoisePrediction gmm_eps_predictor(const VarianceSchedule& schedule, const GmmWorld& world,
                                  const RasterImage& x_t, int t) {
  return gmm_eps_predictor(schedule, world, x_t, t, world.uniform_log_prior());
}

NoisePrediction gmm_eps_predictor(const VarianceSchedule& schedule, const GmmWorld& world,
                                  const RasterImage& x_t, int t, const VectorXd& log_prior) {
  check_image(schedule, x_t, t);
  return NoisePrediction{gmm_epsilon(world, x_t.pixels, schedule.alpha_bar(t), log_prior)};
}

double gmm_marginal_log_density(const VarianceSchedule& schedule, const GmmWorld& world,
                                const ArrayXd& x, int t, const VectorXd& log_prior) {
  if (t < 1 || t > schedule.steps()) throw std::out_of_range("diffusion: step out of range");
  const double ab = schedule.alpha_bar(t);
  const double s = world.within_class_std();
  const double var = std::max(ab * s * s + (1.0 - ab), kVarianceFloor);
  const double root_ab = std::sqrt(ab);

  const VectorXd cross = world.templates() * x.matrix();
  const double x_sq = x.matrix().squaredNorm();
  VectorXd logw(world.class_count());
  for (int k = 0; k < world.class_count(); ++k) {
    const double sq_dist = x_sq - 2.0 * root_ab * cross[k] + ab * world.template_sq_norms()[k];
    logw[k] = log_prior[k] - sq_dist / (2.0 * var);
  }
  const double m = logw.maxCoeff();
  return m + std::log((logw.array() - m).exp().sum());
}

}  // namespace oneshot
