#include "fbasis/local_geometry.hpp"

#include <cmath>
#include <string>

#include "fbasis/error.hpp"

namespace fbasis {

void validate_theta_pre(double theta_pre) {
  if (!(theta_pre > 0.0 && theta_pre < 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "theta_pre must lie in (0, 1), got " + std::to_string(theta_pre));
  }
}

int estimate_local_dim(std::span<const double> sigma, double theta_pre) {
  validate_theta_pre(theta_pre);
  if (sigma.empty() || !(sigma[0] > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "leading singular value must be positive");
  }
  const double threshold = theta_pre * sigma[0];
  int k = 0;
  for (double s : sigma) {
    if (s < threshold) break;
    ++k;
  }
  return k;
}

int estimate_local_dim(const Vector& sigma, double theta_pre) {
  return estimate_local_dim(std::span<const double>(sigma.data(), static_cast<std::size_t>(sigma.size())),
                            theta_pre);
}

LocalChart local_basis(const Matrix& jacobian, double theta_pre) {
  validate_theta_pre(theta_pre);
  if (jacobian.size() == 0) throw Error(ErrorKind::DimensionMismatch, "empty jacobian");
  if (!jacobian.allFinite()) throw Error(ErrorKind::NonFinite, "jacobian has NaN/Inf entries");
  if (jacobian.cwiseAbs().maxCoeff() == 0.0) throw Error(ErrorKind::ZeroJacobian, "jacobian is zero");
  Svd svd = thin_svd(jacobian);
  const int k = estimate_local_dim(svd.s, theta_pre);
  return LocalChart{std::move(svd.s), Frame(std::move(svd.v)), Frame(std::move(svd.u)), k};
}

LocalChart local_basis(const JacobianSample& sample, double theta_pre) {
  return local_basis(sample.jacobian, theta_pre);
}

int estimate_manifold_dim(std::span<const int> local_dims) {
  if (local_dims.empty()) throw Error(ErrorKind::EmptyInput, "no local dimensions");
  long long sum = 0;
  for (int d : local_dims) {
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "local dimension below 1");
    sum += d;
  }
  const auto count = static_cast<long long>(local_dims.size());
  // floor(sum / count + 1/2) in exact integer arithmetic.
  return static_cast<int>((2 * sum + count) / (2 * count));
}

int estimate_manifold_dim(std::span<const LocalChart> charts) {
  if (charts.empty()) throw Error(ErrorKind::EmptyInput, "no charts");
  std::vector<int> dims;
  dims.reserve(charts.size());
  Eigen::Index available = charts.front().available();
  for (const LocalChart& c : charts) {
    dims.push_back(c.local_dim);
    available = std::min(available, c.available());
  }
  const int d_w = estimate_manifold_dim(dims);
  if (d_w > available) {
    throw Error(ErrorKind::InsufficientRank,
                "mean dimension " + std::to_string(d_w) + " exceeds basis size " +
                    std::to_string(available));
  }
  return d_w;
}

Frame dimension_matched_tangent(const LocalChart& chart, int d_w) {
  if (d_w < 1) throw Error(ErrorKind::InvalidArgument, "d_W must be positive");
  if (d_w > chart.available()) {
    throw Error(ErrorKind::InsufficientRank,
                "d_W = " + std::to_string(d_w) + " exceeds " + std::to_string(chart.available()) +
                    " available columns");
  }
  const double floor = 1e-12 * chart.sigma(0);
  int usable = 0;
  for (Eigen::Index i = 0; i < chart.sigma.size(); ++i) {
    if (chart.sigma(i) > floor) ++usable;
  }
  if (usable < d_w) {
    throw Error(ErrorKind::InsufficientRank,
                "only " + std::to_string(usable) + " nonzero singular values for d_W = " +
                    std::to_string(d_w));
  }
  return chart.codomain_basis.leading(d_w);
}

}  // namespace fbasis
