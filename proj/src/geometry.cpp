#include "oneshot/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace oneshot {

namespace {

using Eigen::Matrix3d;
using Eigen::Vector3d;

void check_ranges(const ShapeTweakRanges& r) {
  if (r.rotate_max_deg < 0.0 || r.stretch_max < 0.0 || r.translate_max < 0.0 || r.persp_max < 0.0)
    throw std::invalid_argument("ShapeTweakRanges: ranges must be non-negative");
  if (r.stretch_max >= 1.0) throw std::invalid_argument("ShapeTweakRanges: stretch_max must be < 1");
  if (r.hflip_prob < 0.0 || r.hflip_prob > 1.0)
    throw std::invalid_argument("ShapeTweakRanges: hflip_prob must lie in [0,1]");
}

// Keystone homography in centered coordinates: the two top corners move inward
// by jitter * width, bottom corners stay. Solved from the four correspondences.
Matrix3d keystone(double jitter, double hw, double hh, double width) {
  const double shift = jitter * width;
  const double src_x[4] = {-hw, hw, -hw, hw};
  const double src_y[4] = {-hh, -hh, hh, hh};
  const double dst_x[4] = {-hw + shift, hw - shift, -hw, hw};
  const double dst_y[4] = {-hh, -hh, hh, hh};

  Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    a(2 * i, 0) = src_x[i];
    a(2 * i, 1) = src_y[i];
    a(2 * i, 2) = 1.0;
    a(2 * i, 6) = -dst_x[i] * src_x[i];
    a(2 * i, 7) = -dst_x[i] * src_y[i];
    b(2 * i) = dst_x[i];
    a(2 * i + 1, 3) = src_x[i];
    a(2 * i + 1, 4) = src_y[i];
    a(2 * i + 1, 5) = 1.0;
    a(2 * i + 1, 6) = -dst_y[i] * src_x[i];
    a(2 * i + 1, 7) = -dst_y[i] * src_y[i];
    b(2 * i + 1) = dst_y[i];
  }
  const Eigen::Matrix<double, 8, 1> h = a.colPivHouseholderQr().solve(b);
  Matrix3d m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  return m;
}

double bilinear(const RasterImage& img, double sx, double sy, double fill) {
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double dx = sx - x0;
  const double dy = sy - y0;
  auto fetch = [&](int x, int y) {
    if (x < 0 || x >= img.width || y < 0 || y >= img.height) return fill;
    return img(x, y);
  };
  const double top = (1.0 - dx) * fetch(x0, y0) + dx * fetch(x0 + 1, y0);
  const double bot = (1.0 - dx) * fetch(x0, y0 + 1) + dx * fetch(x0 + 1, y0 + 1);
  return (1.0 - dy) * top + dy * bot;
}

}  // namespace

ShapeTweakParams sample_tweak(const ShapeTweakRanges& ranges, Rng& rng) {
  check_ranges(ranges);
  ShapeTweakParams p;
  p.rotate_deg = uniform_draw(rng, -ranges.rotate_max_deg, ranges.rotate_max_deg);
  p.stretch_x = uniform_draw(rng, 1.0 - ranges.stretch_max, 1.0 + ranges.stretch_max);
  p.stretch_y = uniform_draw(rng, 1.0 - ranges.stretch_max, 1.0 + ranges.stretch_max);
  p.translate_x = uniform_draw(rng, -ranges.translate_max, ranges.translate_max);
  p.translate_y = uniform_draw(rng, -ranges.translate_max, ranges.translate_max);
  p.persp_jitter = uniform_draw(rng, 0.0, ranges.persp_max);
  p.hflip = uniform_draw(rng, 0.0, 1.0) < ranges.hflip_prob;
  return p;
}

RasterImage apply_tweak(const RasterImage& x, const ShapeTweakParams& psi) {
  if (x.width <= 0 || x.height <= 0 || x.pixels.size() == 0)
    throw std::invalid_argument("apply_tweak: empty image");

  const double hw = (x.width - 1) / 2.0;
  const double hh = (x.height - 1) / 2.0;

  // Identity factors are skipped so identity parameters stay byte-stable.
  Matrix3d fwd = Matrix3d::Identity();
  if (psi.hflip) {
    Matrix3d f = Matrix3d::Identity();
    f(0, 0) = -1.0;
    fwd = f * fwd;
  }
  if (psi.stretch_x != 1.0 || psi.stretch_y != 1.0) {
    if (psi.stretch_x <= 0.0 || psi.stretch_y <= 0.0)
      throw std::invalid_argument("apply_tweak: stretch factors must be positive");
    Matrix3d s = Matrix3d::Identity();
    s(0, 0) = psi.stretch_x;
    s(1, 1) = psi.stretch_y;
    fwd = s * fwd;
  }
  if (psi.rotate_deg != 0.0) {
    const double th = psi.rotate_deg * M_PI / 180.0;
    Matrix3d r = Matrix3d::Identity();
    r(0, 0) = std::cos(th);
    r(0, 1) = -std::sin(th);
    r(1, 0) = std::sin(th);
    r(1, 1) = std::cos(th);
    fwd = r * fwd;
  }
  if (psi.translate_x != 0.0 || psi.translate_y != 0.0) {
    Matrix3d t = Matrix3d::Identity();
    t(0, 2) = psi.translate_x * x.width;
    t(1, 2) = psi.translate_y * x.height;
    fwd = t * fwd;
  }
  if (psi.persp_jitter != 0.0) {
    if (psi.persp_jitter < 0.0) throw std::invalid_argument("apply_tweak: persp_jitter must be >= 0");
    fwd = keystone(psi.persp_jitter, hw, hh, x.width) * fwd;
  }

  const Matrix3d inv = fwd.inverse();
  const double fill = border_mean(x);

  RasterImage out(x.width, x.height);
  for (int yo = 0; yo < x.height; ++yo) {
    for (int xo = 0; xo < x.width; ++xo) {
      const Vector3d p = inv * Vector3d(xo - hw, yo - hh, 1.0);
      const double sx = p.x() / p.z() + hw;
      const double sy = p.y() / p.z() + hh;
      out(xo, yo) = bilinear(x, sx, sy, fill);
    }
  }
  return out;
}

double border_mean(const RasterImage& x) {
  double sum = 0.0;
  long count = 0;
  for (int yo = 0; yo < x.height; ++yo) {
    for (int xo = 0; xo < x.width; ++xo) {
      if (xo == 0 || yo == 0 || xo == x.width - 1 || yo == x.height - 1) {
        sum += x(xo, yo);
        ++count;
      }
    }
  }
  return count > 0 ? sum / count : 0.0;
}

}  // namespace oneshot
