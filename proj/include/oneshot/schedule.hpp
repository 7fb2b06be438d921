#pragma once

#include "oneshot/types.hpp"

namespace oneshot {

/// Per-step tables (beta_t, alpha_t, alpha_bar_t) of the variance-preserving
/// process. Steps are indexed t in [1, steps()]; alpha_bar is the running
/// product of alpha and is strictly decreasing.
class VarianceSchedule {
 public:
  explicit VarianceSchedule(ArrayXd beta);

  int steps() const { return static_cast<int>(beta_.size()); }
  double beta(int t) const { return beta_[index(t)]; }
  double alpha(int t) const { return alpha_[index(t)]; }
  double alpha_bar(int t) const { return alpha_bar_[index(t)]; }

  const ArrayXd& beta_table() const { return beta_; }
  const ArrayXd& alpha_table() const { return alpha_; }
  const ArrayXd& alpha_bar_table() const { return alpha_bar_; }

 private:
  long index(int t) const;

  ArrayXd beta_;
  ArrayXd alpha_;
  ArrayXd alpha_bar_;
};

/// Linear interpolation of beta between the endpoints, inclusive.
/// Requires 0 < beta_start <= beta_end < 1 and steps >= 1.
VarianceSchedule build_linear_schedule(int steps, double beta_start, double beta_end);

/// Start time t0 = argmin_t |(1 - alpha_bar_t) - eta^2|, ties broken toward
/// the smaller t.
int eta_to_start_time(const VarianceSchedule& schedule, NoiseLevel eta);

}  // namespace oneshot
