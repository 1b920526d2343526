#include "fbasis/manifolds.hpp"

#include <cmath>

#include "fbasis/error.hpp"

namespace fbasis {

namespace {

constexpr double kSameBaseTol = 1e-12;

bool same_point(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a - b).cwiseAbs().maxCoeff() <= kSameBaseTol;
}

// Polar factor of a nearly orthonormal tall matrix; preserves its span.
Matrix polar(const Matrix& a) {
  const Svd svd = thin_svd(a);
  return svd.u * svd.v.transpose();
}

// (X V cos(Θt) + U sin(Θt)) Vᵀ, with H = U Θ Vᵀ.
Frame walk(const Frame& x, const Matrix& u, const Vector& theta, const Matrix& v, double t) {
  if (t == 0.0) return x;
  const Vector scaled = t * theta;
  const Vector c = scaled.array().cos();
  const Vector s = scaled.array().sin();
  const Matrix a = (x.matrix() * v * c.asDiagonal() + u * s.asDiagonal()) * v.transpose();
  return Frame(polar(a));
}

struct LogParts {
  Matrix u;
  Vector theta;
  Matrix v;
};

LogParts grassmann_log_parts(const Frame& x, const Frame& y, double cut_locus_tol) {
  if (x.ambient_dim() != y.ambient_dim() || x.cols() != y.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "grassmann_log on frames of different shape");
  }
  const Matrix cross = x.matrix().transpose() * y.matrix();
  const Vector sv = singular_values(cross);
  if (sv(sv.size() - 1) < cut_locus_tol) {
    throw Error(ErrorKind::CutLocus, "a principal angle is pi/2 (X^T Y is singular)");
  }
  const Matrix residual = y.matrix() - x.matrix() * cross;
  // residual · cross⁻¹, solved on the transposed system.
  const Matrix m = cross.transpose().partialPivLu().solve(residual.transpose()).transpose();
  const Svd svd = thin_svd(m);
  return {svd.u, svd.s.array().atan().matrix(), svd.v};
}

}  // namespace

GrassmannTangent::GrassmannTangent(Frame base, Matrix direction)
    : base_(std::move(base)), dir_(std::move(direction)) {
  if (dir_.rows() != base_.ambient_dim() || dir_.cols() != base_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "tangent direction shape differs from base");
  }
  if (!dir_.allFinite()) throw Error(ErrorKind::NonFinite, "tangent direction");
  const double err = (base_.matrix().transpose() * dir_).cwiseAbs().maxCoeff();
  if (err > kTangentTol) {
    throw Error(ErrorKind::InvalidArgument,
                "tangent is not horizontal (|X^T H| = " + std::to_string(err) + ")");
  }
}

SoTangent::SoTangent(Rotation base, Matrix direction)
    : base_(std::move(base)), dir_(std::move(direction)) {
  if (dir_.rows() != base_.dim() || dir_.cols() != base_.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "tangent direction shape differs from base");
  }
  if (!dir_.allFinite()) throw Error(ErrorKind::NonFinite, "tangent direction");
  const Matrix omega = base_.matrix().transpose() * dir_;
  const double err = (omega + omega.transpose()).cwiseAbs().maxCoeff();
  if (err > kTangentTol) {
    throw Error(ErrorKind::InvalidArgument,
                "R^T H is not skew-symmetric (error " + std::to_string(err) + ")");
  }
}

GrassmannTangent grassmann_log(const Frame& x, const Frame& y) {
  return grassmann_log(x, y, kCutLocusTol);
}

GrassmannTangent grassmann_log(const Frame& x, const Frame& y, double cut_locus_tol) {
  const LogParts parts = grassmann_log_parts(x, y, cut_locus_tol);
  Matrix h = parts.u * parts.theta.asDiagonal() * parts.v.transpose();
  h -= x.matrix() * (x.matrix().transpose() * h);
  return GrassmannTangent(x, std::move(h));
}

Frame grassmann_exp(const Frame& x, const GrassmannTangent& h) {
  if (!same_point(x.matrix(), h.base().matrix())) {
    throw Error(ErrorKind::BaseMismatch, "tangent is based at a different frame");
  }
  const Svd svd = thin_svd(h.direction());
  return walk(x, svd.u, svd.s, svd.v, 1.0);
}

Frame grassmann_geodesic(const Frame& x, const Frame& y, double t) {
  const LogParts parts = grassmann_log_parts(x, y, kCutLocusTol);
  return walk(x, parts.u, parts.theta, parts.v, t);
}

SoTangent so_log(const Rotation& r1, const Rotation& r2) {
  if (r1.dim() != r2.dim()) throw Error(ErrorKind::DimensionMismatch, "so_log dimensions");
  return SoTangent(r1, r1.matrix() * rotation_log(r1.matrix().transpose() * r2.matrix()));
}

Rotation so_exp(const Rotation& r, const SoTangent& h) {
  if (!same_point(r.matrix(), h.base().matrix())) {
    throw Error(ErrorKind::BaseMismatch, "tangent is based at a different rotation");
  }
  const Matrix omega = skew(r.matrix().transpose() * h.direction());
  return Rotation(r.matrix() * skew_exp(omega));
}

GrassmannTangent Grassmann::project_tangent(const Frame& a, const Matrix& h) const {
  return GrassmannTangent(a, h - a.matrix() * (a.matrix().transpose() * h));
}

SoTangent SpecialOrthogonal::project_tangent(const Rotation& a, const Matrix& h) const {
  return SoTangent(a, a.matrix() * skew(a.matrix().transpose() * h));
}

}  // namespace fbasis
