#include "fbasis/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fbasis/error.hpp"

namespace fbasis {

namespace {

constexpr double kDegenerateLocal = 1e-12;

void validate_power(int norm_power) {
  if (norm_power != 1 && norm_power != 2) {
    throw Error(ErrorKind::InvalidArgument, "norm_power must be 1 or 2");
  }
}

double mean_pair_distance(std::span<const ChartPair> pairs, int norm_power) {
  validate_power(norm_power);
  if (pairs.empty()) throw Error(ErrorKind::EmptyInput, "no chart pairs");
  double sum = 0.0;
  for (const auto& [a, b] : pairs) {
    const double d = tangent_pair_distance(a, b);
    sum += norm_power == 2 ? d * d : d;
  }
  return sum / static_cast<double>(pairs.size());
}

Vector standard_normal(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

}  // namespace

double tangent_pair_distance(const LocalChart& a, const LocalChart& b) {
  const int k = std::min(a.local_dim, b.local_dim);
  return normalized_geodesic_distance(a.codomain_basis.leading(k), b.codomain_basis.leading(k));
}

double i_rand(std::span<const ChartPair> pairs, int norm_power) {
  return mean_pair_distance(pairs, norm_power);
}

double i_local(std::span<const ChartPair> pairs, int norm_power) {
  return mean_pair_distance(pairs, norm_power);
}

DistortionReport distortion_from_pairs(std::span<const ChartPair> random_pairs,
                                       std::span<const ChartPair> local_pairs, int norm_power,
                                       double epsilon) {
  DistortionReport report;
  report.norm_power = norm_power;
  report.epsilon = epsilon;
  report.pair_count = random_pairs.size();
  report.i_rand = i_rand(random_pairs, norm_power);
  report.i_local = i_local(local_pairs, norm_power);
  if (report.i_local < kDegenerateLocal) {
    throw Error(ErrorKind::DegenerateLocalVariation,
                "I_local = " + std::to_string(report.i_local) + " is below 1e-12");
  }
  report.distortion = report.i_rand / report.i_local;
  return report;
}

DistortionReport distortion(const SynthNet& net, double theta_pre, double epsilon,
                            std::size_t pair_count, std::uint64_t seed, int norm_power) {
  validate_theta_pre(theta_pre);
  validate_power(norm_power);
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (pair_count == 0) throw Error(ErrorKind::EmptyInput, "pair_count must be positive");

  std::mt19937_64 rng(seed);
  const Eigen::Index d = net.input_dim();
  const auto chart = [&](const Vector& z) { return local_basis(net.jacobian(z), theta_pre); };

  std::vector<ChartPair> random_pairs;
  random_pairs.reserve(pair_count);
  for (std::size_t i = 0; i < pair_count; ++i) {
    const Vector z1 = standard_normal(rng, d);
    const Vector z2 = standard_normal(rng, d);
    random_pairs.emplace_back(chart(z1), chart(z2));
  }
  std::vector<ChartPair> local_pairs;
  local_pairs.reserve(pair_count);
  for (std::size_t i = 0; i < pair_count; ++i) {
    const Vector z1 = standard_normal(rng, d);
    const Vector u = standard_normal(rng, d).normalized();
    local_pairs.emplace_back(chart(z1), chart(z1 + epsilon * u));
  }
  return distortion_from_pairs(random_pairs, local_pairs, norm_power, epsilon);
}

double i_global(const Frame& mu, std::span<const Frame> tangents, bool squared) {
  if (tangents.empty()) throw Error(ErrorKind::EmptyInput, "no tangent frames");
  double sum = 0.0;
  for (const Frame& t : tangents) {
    const double d = geodesic_distance(mu, t);
    sum += squared ? d * d : d;
  }
  const double mean = sum / static_cast<double>(tangents.size());
  const double k = static_cast<double>(mu.cols());
  return squared ? mean / k : mean / std::sqrt(k);
}

}  // namespace fbasis
