#include "fbasis/frechet.hpp"

#include <cmath>

namespace fbasis {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::MaxIter: return "MaxIter";
    case Termination::MaxTime: return "MaxTime";
    case Termination::Stalled: return "Stalled";
  }
  return "Unknown";
}

void SolverConfig::validate() const {
  if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
  if (!(max_time > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_time must be positive");
  if (!(grad_tol >= 0.0) || !(grad_abs_tol >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "gradient tolerances must be nonnegative");
  }
  if (!(step.eta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be nonnegative");
  if (step.kind == StepRule::Kind::Backtracking) {
    if (!(step.shrink > 0.0 && step.shrink < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "shrink factor must lie in (0, 1)");
    }
    if (!(step.sufficient_decrease > 0.0 && step.sufficient_decrease < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "sufficient-decrease constant must lie in (0, 1)");
    }
  }
}

SolverConfig SolverConfig::subspace_defaults() {
  SolverConfig c;
  c.max_iter = 1000;
  c.max_time = 2000.0;
  return c;
}

SolverConfig SolverConfig::basis_defaults() {
  SolverConfig c;
  c.max_iter = 200;
  c.max_time = 10000.0;
  return c;
}

Frame extrinsic_mean_grassmann(std::span<const Frame> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "extrinsic mean of no frames");
  const Eigen::Index n = points.front().ambient_dim();
  const Eigen::Index k = points.front().cols();
  Matrix average = Matrix::Zero(n, n);
  for (const Frame& f : points) {
    if (f.ambient_dim() != n || f.cols() != k) {
      throw Error(ErrorKind::DimensionMismatch, "frames of different shape");
    }
    average.noalias() += f.matrix() * f.matrix().transpose();
  }
  average /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(average);
  const Vector& lambda = eig.eigenvalues();  // ascending
  if (k < n && lambda(n - k) - lambda(n - k - 1) <= 1e-10) {
    throw Error(ErrorKind::EigengapDegenerate,
                "eigenvalues " + std::to_string(k) + " and " + std::to_string(k + 1) +
                    " of the mean projection coincide");
  }
  Matrix top = eig.eigenvectors().rightCols(k).rowwise().reverse();
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    top.col(j).cwiseAbs().maxCoeff(&arg);
    if (top(arg, j) < 0) top.col(j) = -top.col(j);
  }
  return Frame(std::move(top));
}

}  // namespace fbasis
