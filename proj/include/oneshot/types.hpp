#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace oneshot {

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using ArrayX = Eigen::Array<T, Eigen::Dynamic, 1>;

using MatrixXd = MatrixX<double>;
using VectorXd = VectorX<double>;
using ArrayXd = ArrayX<double>;

/// Small grayscale raster. Pixels are stored row-major and may leave [0,1]
/// while an image is being noised/denoised; values are clamped only on export.
struct RasterImage {
  int width = 0;
  int height = 0;
  ArrayXd pixels;

  RasterImage() = default;
  RasterImage(int w, int h) : width(w), height(h), pixels(ArrayXd::Zero(static_cast<long>(w) * h)) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("RasterImage: dimensions must be positive");
  }
  RasterImage(int w, int h, ArrayXd px) : width(w), height(h), pixels(std::move(px)) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("RasterImage: dimensions must be positive");
    if (pixels.size() != static_cast<long>(w) * h)
      throw std::invalid_argument("RasterImage: pixel buffer does not match dimensions");
  }

  int size() const { return width * height; }
  double& operator()(int x, int y) { return pixels[static_cast<long>(y) * width + x]; }
  double operator()(int x, int y) const { return pixels[static_cast<long>(y) * width + x]; }
};

/// User-facing noise level; maps to a diffusion start time by cumulative-noise matching.
struct NoiseLevel {
  double value = 0.0;
  explicit NoiseLevel(double eta) : value(eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("NoiseLevel: eta must lie in [0,1]");
  }
};

}  // namespace oneshot
