#include "oneshot/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace oneshot {

VarianceSchedule::VarianceSchedule(ArrayXd beta) : beta_(std::move(beta)) {
  if (beta_.size() < 1) throw std::invalid_argument("VarianceSchedule: needs at least one step");
  if (!((beta_ > 0.0).all() && (beta_ < 1.0).all()))
    throw std::invalid_argument("VarianceSchedule: beta values must lie in (0,1)");
  alpha_ = 1.0 - beta_;
  alpha_bar_.resize(beta_.size());
  double prod = 1.0;
  for (long i = 0; i < beta_.size(); ++i) {
    prod *= alpha_[i];
    alpha_bar_[i] = prod;
  }
}

long VarianceSchedule::index(int t) const {
  if (t < 1 || t > steps()) throw std::out_of_range("VarianceSchedule: step out of range");
  return t - 1;
}

VarianceSchedule build_linear_schedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw std::invalid_argument("build_linear_schedule: steps must be >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
    throw std::invalid_argument("build_linear_schedule: need 0 < beta_start <= beta_end < 1");
  ArrayXd beta(steps);
  if (steps == 1) {
    beta[0] = beta_start;
  } else {
    for (int i = 0; i < steps; ++i)
      beta[i] = beta_start + (beta_end - beta_start) * static_cast<double>(i) / (steps - 1);
  }
  return VarianceSchedule(std::move(beta));
}

int eta_to_start_time(const VarianceSchedule& schedule, NoiseLevel eta) {
  const double target = eta.value * eta.value;
  int best_t = 1;
  double best_gap = std::abs((1.0 - schedule.alpha_bar(1)) - target);
  for (int t = 2; t <= schedule.steps(); ++t) {
    const double gap = std::abs((1.0 - schedule.alpha_bar(t)) - target);
    if (gap < best_gap) {
      best_gap = gap;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace oneshot
