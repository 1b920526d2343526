#pragma once

/// @file
/// Riemannian structure of the two manifolds the method averages on: the
/// Grassmannian Gr(k, Rⁿ), with points represented by orthonormal frames and
/// tangents by horizontal n×k matrices, and SO(k) with the bi-invariant
/// metric ‖Skew(log(R1ᵀR2))‖_F.
///
/// Both tangent types carry their base point; using a tangent at a different
/// point is a BaseMismatch error.

#include <concepts>

#include "fbasis/frames.hpp"

namespace fbasis {

inline constexpr double kTangentTol = 1e-9;
inline constexpr double kCutLocusTol = 1e-10;

class GrassmannTangent {
 public:
  /// Checks shape and horizontality (max |baseᵀH| ≤ 1e−9).
  GrassmannTangent(Frame base, Matrix direction);

  const Frame& base() const { return base_; }
  const Matrix& direction() const { return dir_; }
  double norm() const { return dir_.norm(); }

 private:
  Frame base_;
  Matrix dir_;
};

class SoTangent {
 public:
  /// Checks that baseᵀH is skew-symmetric within 1e−9.
  SoTangent(Rotation base, Matrix direction);

  const Rotation& base() const { return base_; }
  const Matrix& direction() const { return dir_; }
  double norm() const { return dir_.norm(); }

 private:
  Rotation base_;
  Matrix dir_;
};

/// Throws CutLocus when σ_min(XᵀY) < 1e−10.
GrassmannTangent grassmann_log(const Frame& x, const Frame& y);
GrassmannTangent grassmann_log(const Frame& x, const Frame& y, double cut_locus_tol);
Frame grassmann_exp(const Frame& x, const GrassmannTangent& h);
/// Γ(X, Y, t) = (X V cos(Θt) + U sin(Θt)) Vᵀ. `t` may leave [0, 1].
Frame grassmann_geodesic(const Frame& x, const Frame& y, double t);

SoTangent so_log(const Rotation& r1, const Rotation& r2);
Rotation so_exp(const Rotation& r, const SoTangent& h);

/// Gr(k, Rⁿ) with the geodesic (principal-angle) metric.
struct Grassmann {
  using Point = Frame;
  using Tangent = GrassmannTangent;

  double distance(const Frame& a, const Frame& b) const { return geodesic_distance(a, b); }
  Tangent log(const Frame& a, const Frame& b) const { return grassmann_log(a, b); }
  Frame exp(const Frame& a, const Tangent& v) const { return grassmann_exp(a, v); }
  /// Horizontal projection H − X XᵀH.
  Tangent project_tangent(const Frame& a, const Matrix& h) const;
  static constexpr const char* name() { return "grassmann"; }
};

/// SO(k) with the skew-log metric.
struct SpecialOrthogonal {
  using Point = Rotation;
  using Tangent = SoTangent;

  double distance(const Rotation& a, const Rotation& b) const { return so_distance(a, b); }
  Tangent log(const Rotation& a, const Rotation& b) const { return so_log(a, b); }
  Rotation exp(const Rotation& a, const Tangent& v) const { return so_exp(a, v); }
  /// R · Skew(RᵀH).
  Tangent project_tangent(const Rotation& a, const Matrix& h) const;
  static constexpr const char* name() { return "special_orthogonal"; }
};

template <class M>
concept RiemannianManifold = requires(const M& m, const typename M::Point& p,
                                      const typename M::Tangent& v, const Matrix& h) {
  { m.distance(p, p) } -> std::convertible_to<double>;
  { m.log(p, p) } -> std::same_as<typename M::Tangent>;
  { m.exp(p, v) } -> std::same_as<typename M::Point>;
  { m.project_tangent(p, h) } -> std::same_as<typename M::Tangent>;
  { v.direction() } -> std::convertible_to<const Matrix&>;
};

static_assert(RiemannianManifold<Grassmann>);
static_assert(RiemannianManifold<SpecialOrthogonal>);

}  // namespace fbasis
