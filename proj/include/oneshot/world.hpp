#pragma once

#include "oneshot/rng.hpp"
#include "oneshot/types.hpp"

namespace oneshot {

/// Synthetic data distribution: fixed class templates plus isotropic
/// per-pixel Gaussian noise, with equal class priors. Everything about it
/// (density, score, samples) is analytically available.
class GmmWorld {
 public:
  /// templates: one row per class mean, pixel_count columns.
  GmmWorld(MatrixXd templates, int width, int height, double within_class_std);

  int class_count() const { return static_cast<int>(templates_.rows()); }
  int pixel_count() const { return static_cast<int>(templates_.cols()); }
  int width() const { return width_; }
  int height() const { return height_; }
  double within_class_std() const { return s_; }

  const MatrixXd& templates() const { return templates_; }
  const VectorXd& template_sq_norms() const { return template_sq_norms_; }
  RasterImage template_image(int k) const;

  RasterImage sample(int k, Rng& rng) const;
  int nearest_template(const RasterImage& x) const;

  /// Uniform log prior over the components.
  VectorXd uniform_log_prior() const;

  /// log N(x; mu_k, max(s^2, floor) I) for every component, up to a constant
  /// shared across components.
  VectorXd component_log_likelihood(const ArrayXd& x) const;

  /// Whether the templates clear the separability budget
  /// min_{i != j} ||mu_i - mu_j|| > 6 * s * sqrt(pixel_count).
  bool separability_ok() const;
  double min_template_distance() const { return min_template_distance_; }

 private:
  MatrixXd templates_;
  VectorXd template_sq_norms_;
  int width_ = 0;
  int height_ = 0;
  double s_ = 0.0;
  double min_template_distance_ = 0.0;
};

/// Procedural glyph templates (bars, crosses, diagonals, blobs) kept inside
/// the central disc so default shape tweaks never clip them off the canvas.
GmmWorld make_glyph_world(int class_count, int width, int height, double within_class_std);

}  // namespace oneshot
