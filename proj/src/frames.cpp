#include "fbasis/frames.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbasis/error.hpp"

namespace fbasis {

namespace {

constexpr double kRankTol = 1e-12;
constexpr double kLogTol = 1e-8;
// Above this size BDCSVD is used; Jacobi is more accurate on small blocks.
constexpr Eigen::Index kJacobiMaxDim = 64;

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorKind::NonFinite, std::string(what) + " has NaN/Inf entries");
}

void require_same_shape(const Frame& x, const Frame& y) {
  if (x.ambient_dim() != y.ambient_dim() || x.cols() != y.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "frames " + shape(x.matrix()) + " and " + shape(y.matrix()));
  }
}

void apply_sign_convention(Matrix& u, Matrix& v) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index arg = 0;
    u.col(j).cwiseAbs().maxCoeff(&arg);
    if (u(arg, j) < 0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

// φ/sin φ as a function of c = cos φ; smooth on (−1, 1].
double angle_over_sine(double c) {
  const double x = 1.0 - c;
  if (x <= 0.0) return 1.0;
  if (x < 1e-6) return 1.0 + x / 3.0 + 2.0 * x * x / 15.0;
  return std::acos(c) / std::sqrt(x * (1.0 + c));
}

}  // namespace

double orthonormality_error(const Matrix& m) {
  const Matrix gram = m.transpose() * m;
  return (gram - Matrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

Frame::Frame(Matrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw Error(ErrorKind::InvalidArgument, "empty frame");
  if (m_.cols() > m_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "frame is wider than tall: " + shape(m_));
  }
  require_finite(m_, "frame");
  const double err = orthonormality_error(m_);
  if (err > tol) {
    throw Error(ErrorKind::NotOrthonormal,
                "columns deviate from orthonormal by " + std::to_string(err));
  }
}

Frame Frame::leading(Eigen::Index k) const {
  if (k < 1 || k > cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "cannot take " + std::to_string(k) + " of " + std::to_string(cols()) + " columns");
  }
  return Frame(m_.leftCols(k));
}

Frame Frame::standard(Eigen::Index n, Eigen::Index k) { return Frame(Matrix::Identity(n, k)); }

Rotation::Rotation(Matrix m, double tol, double det_tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "rotation must be square, got " + shape(m_));
  }
  require_finite(m_, "rotation");
  const double err = orthonormality_error(m_);
  if (err > tol) {
    throw Error(ErrorKind::NotRotation, "not orthogonal (error " + std::to_string(err) + ")");
  }
  const double det = m_.determinant();
  if (std::abs(det - 1.0) > det_tol) {
    throw Error(ErrorKind::NotRotation, "determinant " + std::to_string(det));
  }
}

Rotation Rotation::identity(Eigen::Index k) { return Rotation(Matrix::Identity(k, k)); }

Rotation Rotation::planar(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return Rotation(std::move(r));
}

Svd thin_svd(const Matrix& a) {
  Svd out;
  if (std::min(a.rows(), a.cols()) <= kJacobiMaxDim) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out = {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  } else {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out = {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  apply_sign_convention(out.u, out.v);
  return out;
}

Vector singular_values(const Matrix& a) {
  if (std::min(a.rows(), a.cols()) <= kJacobiMaxDim) {
    return Eigen::JacobiSVD<Matrix>(a).singularValues();
  }
  return Eigen::BDCSVD<Matrix>(a).singularValues();
}

Frame orthonormalize(const Matrix& raw) {
  require_finite(raw, "input");
  if (raw.cols() == 0 || raw.cols() > raw.rows()) {
    throw Error(ErrorKind::RankDeficient, "cannot orthonormalize " + shape(raw));
  }
  const Vector sv = singular_values(raw);
  if (sv(0) == 0.0 || sv(sv.size() - 1) < kRankTol * sv(0)) {
    throw Error(ErrorKind::RankDeficient, "numerical rank below " + std::to_string(raw.cols()));
  }
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix q = qr.householderQ() * Matrix::Identity(raw.rows(), raw.cols());
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return Frame(std::move(q));
}

namespace {

// Lexicographic order on entries; evaluating in a fixed order makes the
// angles bitwise symmetric in their arguments.
bool ordered_before(const Matrix& a, const Matrix& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

AngleVector principal_angles(const Frame& first, const Frame& second) {
  require_same_shape(first, second);
  const bool swap = ordered_before(second.matrix(), first.matrix());
  const Frame& x = swap ? second : first;
  const Frame& y = swap ? first : second;
  const Matrix cross = x.matrix().transpose() * y.matrix();
  const Vector cosines = singular_values(cross);  // descending
  // Sines from the component of Y orthogonal to X; acos alone loses half the
  // digits for small angles.
  const Vector sines = singular_values(y.matrix() - x.matrix() * cross);  // descending
  const auto k = static_cast<std::size_t>(x.cols());
  AngleVector out;
  out.angles.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double c = std::clamp(cosines(static_cast<Eigen::Index>(i)), -1.0, 1.0);
    const double s = std::clamp(sines(static_cast<Eigen::Index>(k - 1 - i)), 0.0, 1.0);
    out.angles[i] = (c * c >= 0.5) ? std::asin(s) : std::acos(c);
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

double geodesic_distance(const Frame& x, const Frame& y) {
  double sum = 0.0;
  for (double theta : principal_angles(x, y).angles) sum += theta * theta;
  return std::sqrt(sum);
}

double normalized_geodesic_distance(const Frame& x, const Frame& y) {
  return geodesic_distance(x, y) / std::sqrt(static_cast<double>(x.cols()));
}

namespace {

Eigen::JacobiSVD<Matrix> checked_square_svd(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "expected a square matrix, got " + shape(a));
  }
  require_finite(a, "matrix");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  if (s(0) == 0.0 || s(s.size() - 1) <= kRankTol * s(0)) {
    throw Error(ErrorKind::Singular, "matrix is numerically singular");
  }
  return svd;
}

}  // namespace

Matrix project_orthogonal(const Matrix& a) {
  const auto svd = checked_square_svd(a);
  return svd.matrixU() * svd.matrixV().transpose();
}

Rotation project_special_orthogonal(const Matrix& a) {
  const auto svd = checked_square_svd(a);
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  const double det = (u * v.transpose()).determinant();
  Vector d = Vector::Ones(a.rows());
  // Smallest singular value sits last.
  d(d.size() - 1) = det < 0 ? -1.0 : 1.0;
  return Rotation(u * d.asDiagonal() * v.transpose());
}

Frame align_signs(const Frame& m, const Frame& reference) {
  require_same_shape(m, reference);
  Matrix out = m.matrix();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (out.col(j).dot(reference.matrix().col(j)) < 0) out.col(j) = -out.col(j);
  }
  return Frame(std::move(out));
}

Matrix skew(const Matrix& a) { return 0.5 * (a - a.transpose()); }

Matrix rotation_log(const Matrix& r) {
  // R is normal: its symmetric part C and skew part S commute, C carries cos φ
  // and S carries sin φ on each invariant plane, so log R = S · (φ / sin φ)(C).
  const Matrix c = 0.5 * (r + r.transpose());
  const Matrix s = skew(r);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  const Vector& lambda = eig.eigenvalues();  // ascending
  const double gap = std::sqrt(2.0 * std::max(0.0, 1.0 + lambda(0)));
  if (gap < kLogTol) {
    throw Error(ErrorKind::LogUndefined, "rotation has an eigenvalue at -1");
  }
  Vector h(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    h(i) = angle_over_sine(std::min(lambda(i), 1.0));
  }
  const Matrix& q = eig.eigenvectors();
  return skew(s * (q * h.asDiagonal() * q.transpose()));
}

Matrix skew_exp(const Matrix& omega) {
  const Eigen::Index k = omega.rows();
  const Matrix sq = omega * omega;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(-0.5 * (sq + sq.transpose()));
  const Vector& phi2 = eig.eigenvalues();
  Vector f1(k), f2(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double p2 = std::max(0.0, phi2(i));
    if (p2 < 1e-8) {
      f1(i) = 1.0 - p2 / 6.0 + p2 * p2 / 120.0;
      f2(i) = 0.5 - p2 / 24.0 + p2 * p2 / 720.0;
    } else {
      const double p = std::sqrt(p2);
      const double half = std::sin(0.5 * p);
      f1(i) = std::sin(p) / p;
      f2(i) = 2.0 * half * half / p2;
    }
  }
  const Matrix& q = eig.eigenvectors();
  return Matrix::Identity(k, k) + omega * (q * f1.asDiagonal() * q.transpose()) +
         sq * (q * f2.asDiagonal() * q.transpose());
}

double so_distance(const Rotation& r1, const Rotation& r2) {
  if (r1.dim() != r2.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "rotations of different dimension");
  }
  return rotation_log(r1.matrix().transpose() * r2.matrix()).norm();
}

}  // namespace fbasis
