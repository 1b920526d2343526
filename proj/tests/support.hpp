#pragma once

// Test-only generators and independent oracles. Nothing here calls into the
// code paths it is used to check (no SVD-based projection, no log maps).

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "fbasis/frames.hpp"

namespace fbasis::testing {

inline constexpr double kPi = std::numbers::pi;

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

// Gram–Schmidt, independent of the library's QR path.
inline Matrix gram_schmidt(Matrix m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) m.col(j) -= m.col(i).dot(m.col(j)) * m.col(i);
    }
    m.col(j).normalize();
  }
  return m;
}

inline Frame random_frame(std::mt19937_64& rng, Eigen::Index n, Eigen::Index k) {
  return Frame(gram_schmidt(gaussian(rng, n, k)));
}

inline Rotation random_rotation(std::mt19937_64& rng, Eigen::Index k) {
  Matrix q = gram_schmidt(gaussian(rng, k, k));
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return Rotation(q);
}

// Frame rotated towards a random horizontal direction by at most `max_angle`
// per principal angle; keeps pairs away from the cut locus.
inline Frame nearby_frame(std::mt19937_64& rng, const Frame& x, double max_angle) {
  const Eigen::Index n = x.ambient_dim(), k = x.cols();
  Matrix h = gaussian(rng, n, k);
  h -= x.matrix() * (x.matrix().transpose() * h);
  const Matrix q = gram_schmidt(h);
  std::uniform_real_distribution<double> angle(0.0, max_angle);
  Matrix y(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double t = angle(rng);
    y.col(j) = std::cos(t) * x.matrix().col(j) + std::sin(t) * q.col(j);
  }
  return Frame(gram_schmidt(y));
}

inline Frame line(double angle) {
  Matrix m(2, 1);
  m << std::cos(angle), std::sin(angle);
  return Frame(m);
}

inline Matrix planar(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

// argmin over a uniform grid of [lo, hi) with the given step.
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi, double step) {
  double best = lo, best_value = f(lo);
  const auto steps = static_cast<long>((hi - lo) / step);
  for (long i = 1; i < steps; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const double v = f(x);
    if (v < best_value) {
      best_value = v;
      best = x;
    }
  }
  return best;
}

// Distance between lines through the origin at angles a and b.
inline double line_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

// Geodesic distance on SO(2) between R(a) and R(b).
inline double so2_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::sqrt(2.0) * std::min(d, 2.0 * kPi - d);
}

// Per-entry relative error; the floor only guards entries that vanish.
inline double relative_error(double got, double want, double floor = 1e-6) {
  return std::abs(got - want) / std::max(floor, std::abs(want));
}

}  // namespace fbasis::testing
