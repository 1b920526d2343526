#pragma once

/// @file
/// Local geometry of a latent manifold w = f(z): the Local Basis (codomain
/// singular vectors of the Jacobian df_z), an intrinsic local dimension per
/// sample, and the dimension-matched tangent frames fed to the averaging
/// stages.

#include <optional>
#include <span>

#include "fbasis/frames.hpp"

namespace fbasis {

inline constexpr double kDefaultThetaPre = 0.01;

struct JacobianSample {
  Vector z;
  Matrix jacobian;  // d_W̃ × d_Z
  std::optional<Vector> w;
};

/// df_z(u_i) = σ_i v_i. `codomain_basis` holds v_i (the Local Basis),
/// `domain_basis` holds u_i. Both are thin: min(d_Z, d_W̃) columns.
struct LocalChart {
  Vector sigma;
  Frame domain_basis;
  Frame codomain_basis;
  int local_dim = 1;

  Eigen::Index available() const { return codomain_basis.cols(); }
  /// Span of the top-`local_dim` Local Basis vectors.
  Frame tangent() const { return codomain_basis.leading(local_dim); }
};

/// Largest k with σ_k ≥ θ_pre · σ_1. θ_pre must lie in (0, 1).
int estimate_local_dim(std::span<const double> sigma, double theta_pre);
int estimate_local_dim(const Vector& sigma, double theta_pre);

LocalChart local_basis(const JacobianSample& sample, double theta_pre = kDefaultThetaPre);
LocalChart local_basis(const Matrix& jacobian, double theta_pre = kDefaultThetaPre);

/// Mean of the charts' local dimensions, rounded half-up.
int estimate_manifold_dim(std::span<const LocalChart> charts);
int estimate_manifold_dim(std::span<const int> local_dims);

/// Top-d_W codomain singular vectors, truncating or extending the chart's
/// own tangent. Throws InsufficientRank when fewer than d_W singular values
/// exceed 1e−12·σ_1.
Frame dimension_matched_tangent(const LocalChart& chart, int d_w);

void validate_theta_pre(double theta_pre);

}  // namespace fbasis
