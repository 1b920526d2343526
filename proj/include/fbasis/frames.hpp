#pragma once

/// @file
/// Matrix-geometry primitives: orthonormal frames, rotations, principal
/// angles between subspaces, projections onto O(k) and SO(k), and the
/// skew-log metric on SO(k).

#include <Eigen/Dense>

#include <vector>

namespace fbasis {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kFrameTol = 1e-10;
inline constexpr double kDetTol = 1e-8;

/// Tall matrix with orthonormal columns. Column j is basis vector j.
class Frame {
 public:
  /// Validates orthonormality (max |MᵀM − I| ≤ tol) and finiteness.
  explicit Frame(Matrix m, double tol = kFrameTol);

  Eigen::Index ambient_dim() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  const Matrix& matrix() const { return m_; }

  /// First `k` columns.
  Frame leading(Eigen::Index k) const;

  static Frame standard(Eigen::Index n, Eigen::Index k);

 private:
  Matrix m_;
};

/// Square orthogonal matrix with determinant +1.
class Rotation {
 public:
  explicit Rotation(Matrix m, double tol = kFrameTol, double det_tol = kDetTol);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

  static Rotation identity(Eigen::Index k);
  /// Planar rotation by `angle` (counter-clockwise).
  static Rotation planar(double angle);

 private:
  Matrix m_;
};

/// Principal angles in [0, π/2], ascending.
struct AngleVector {
  std::vector<double> angles;

  std::size_t size() const { return angles.size(); }
  double operator[](std::size_t i) const { return angles[i]; }
};

/// Thin SVD with the deterministic sign convention applied: each left
/// singular vector's largest-magnitude entry is positive and the matching
/// right vector is flipped with it. Singular values descending.
struct Svd {
  Matrix u;
  Vector s;
  Matrix v;
};
Svd thin_svd(const Matrix& a);
Vector singular_values(const Matrix& a);

/// Max |MᵀM − I|.
double orthonormality_error(const Matrix& m);

Frame orthonormalize(const Matrix& raw);

AngleVector principal_angles(const Frame& x, const Frame& y);
double geodesic_distance(const Frame& x, const Frame& y);
/// Geodesic distance scaled by 1/√k.
double normalized_geodesic_distance(const Frame& x, const Frame& y);

/// Polar factor UVᵀ; orthogonal with det ±1.
Matrix project_orthogonal(const Matrix& a);
/// Frobenius-nearest element of SO(k): U diag(1, …, 1, det(UVᵀ)) Vᵀ.
Rotation project_special_orthogonal(const Matrix& a);

/// Flips columns of `m` so that ⟨m_i, reference_i⟩ ≥ 0. A zero inner
/// product leaves the column as is.
Frame align_signs(const Frame& m, const Frame& reference);

/// Skew part of the principal logarithm of a rotation, angles in (−π, π].
/// Throws LogUndefined when an eigenvalue sits within 1e−8 of −1.
Matrix rotation_log(const Matrix& r);
/// Exponential of a skew-symmetric matrix (exact closed form per plane).
Matrix skew_exp(const Matrix& omega);

Matrix skew(const Matrix& a);

/// ‖Skew(log(R1ᵀR2))‖_F.
double so_distance(const Rotation& r1, const Rotation& r2);

}  // namespace fbasis
