#include "oneshot/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oneshot {

namespace {

constexpr double kVarianceFloor = 1e-12;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Antialiased stroke from a skeleton distance, ~3 px wide.
double stroke(double d) { return clamp01(1.5 - d); }

}  // namespace

GmmWorld::GmmWorld(MatrixXd templates, int width, int height, double within_class_std)
    : templates_(std::move(templates)), width_(width), height_(height), s_(within_class_std) {
  if (templates_.rows() < 1) throw std::invalid_argument("GmmWorld: needs at least one template");
  if (width_ <= 0 || height_ <= 0) throw std::invalid_argument("GmmWorld: bad dimensions");
  if (templates_.cols() != static_cast<long>(width_) * height_)
    throw std::invalid_argument("GmmWorld: template size does not match dimensions");
  if (s_ < 0.0) throw std::invalid_argument("GmmWorld: within-class std must be >= 0");
  if (!templates_.allFinite()) throw std::invalid_argument("GmmWorld: templates must be finite");

  template_sq_norms_ = templates_.rowwise().squaredNorm();

  min_template_distance_ = std::numeric_limits<double>::infinity();
  for (long i = 0; i < templates_.rows(); ++i)
    for (long j = i + 1; j < templates_.rows(); ++j)
      min_template_distance_ =
          std::min(min_template_distance_, (templates_.row(i) - templates_.row(j)).norm());
  if (templates_.rows() > 1 && !(min_template_distance_ > 0.0))
    throw std::invalid_argument("GmmWorld: templates must be pairwise distinct");
}

RasterImage GmmWorld::template_image(int k) const {
  if (k < 0 || k >= class_count()) throw std::out_of_range("GmmWorld: class index out of range");
  return RasterImage(width_, height_, templates_.row(k).transpose().array());
}

RasterImage GmmWorld::sample(int k, Rng& rng) const {
  RasterImage out = template_image(k);
  if (s_ > 0.0) out.pixels += s_ * normal_array(out.pixels.size(), rng);
  return out;
}

int GmmWorld::nearest_template(const RasterImage& x) const {
  const VectorXd cross = templates_ * x.pixels.matrix();
  int best = 0;
  double best_score = template_sq_norms_[0] - 2.0 * cross[0];
  for (int k = 1; k < class_count(); ++k) {
    const double score = template_sq_norms_[k] - 2.0 * cross[k];
    if (score < best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

VectorXd GmmWorld::uniform_log_prior() const {
  return VectorXd::Constant(class_count(), -std::log(static_cast<double>(class_count())));
}

VectorXd GmmWorld::component_log_likelihood(const ArrayXd& x) const {
  if (x.size() != templates_.cols())
    throw std::invalid_argument("GmmWorld: image size does not match templates");
  const double var = std::max(s_ * s_, kVarianceFloor);
  const double x_sq = x.matrix().squaredNorm();
  const VectorXd cross = templates_ * x.matrix();
  VectorXd out(class_count());
  for (int k = 0; k < class_count(); ++k)
    out[k] = -(x_sq - 2.0 * cross[k] + template_sq_norms_[k]) / (2.0 * var);
  return out;
}

bool GmmWorld::separability_ok() const {
  return min_template_distance_ > 6.0 * s_ * std::sqrt(static_cast<double>(pixel_count()));
}

GmmWorld make_glyph_world(int class_count, int width, int height, double within_class_std) {
  if (class_count < 1) throw std::invalid_argument("make_glyph_world: class_count must be >= 1");
  if (width < 8 || height < 8) throw std::invalid_argument("make_glyph_world: canvas too small");

  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  const double scale = std::min(width, height) / 16.0;
  const double reach = 5.1 * scale;  // content stays inside this radius

  MatrixXd templates(class_count, static_cast<long>(width) * height);
  for (int k = 0; k < class_count; ++k) {
    // Sixteen base glyphs; extra classes reuse the family with shifted offsets.
    const int kind = k % 16;
    const double extra = 0.9 * scale * (k / 16);
    const double off = 3.2 * scale;
    const double blob_off = 2.6 * scale;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double u = x - cx;
        const double v = y - cy;
        const double r = std::hypot(u, v);
        const double mask = clamp01(reach + 0.5 - r);
        double val = 0.0;
        switch (kind) {
          case 0: val = stroke(std::abs(v + off + extra)); break;
          case 1: val = stroke(std::abs(v)); break;
          case 2: val = stroke(std::abs(v - off - extra)); break;
          case 3: val = stroke(std::abs(u + off + extra)); break;
          case 4: val = stroke(std::abs(u)); break;
          case 5: val = stroke(std::abs(u - off - extra)); break;
          case 6: val = stroke(std::abs(u - v) / std::sqrt(2.0)); break;
          case 7: val = stroke(std::abs(u + v) / std::sqrt(2.0)); break;
          case 8: val = std::max(stroke(std::abs(u)), stroke(std::abs(v))); break;
          case 9:
            val = std::max(stroke(std::abs(u - v) / std::sqrt(2.0)),
                           stroke(std::abs(u + v) / std::sqrt(2.0)));
            break;
          case 10: val = std::exp(-(std::pow(u + blob_off, 2) + std::pow(v + blob_off, 2)) / (2.0 * std::pow(1.8 * scale, 2))); break;
          case 11: val = std::exp(-(std::pow(u - blob_off, 2) + std::pow(v + blob_off, 2)) / (2.0 * std::pow(1.8 * scale, 2))); break;
          case 12: val = std::exp(-(std::pow(u + blob_off, 2) + std::pow(v - blob_off, 2)) / (2.0 * std::pow(1.8 * scale, 2))); break;
          case 13: val = std::exp(-(std::pow(u - blob_off, 2) + std::pow(v - blob_off, 2)) / (2.0 * std::pow(1.8 * scale, 2))); break;
          case 14: val = stroke(std::abs(r - 3.4 * scale)); break;
          case 15: val = std::exp(-r * r / (2.0 * std::pow(2.6 * scale, 2))); break;
        }
        templates(k, static_cast<long>(y) * width + x) = clamp01(val) * mask;
      }
    }
  }
  return GmmWorld(std::move(templates), width, height, within_class_std);
}

}  // namespace oneshot
