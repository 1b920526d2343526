#pragma once

/// @file
/// Distortion of a latent manifold: the mean normalized geodesic distance
/// between intrinsic tangent spaces at random input pairs (I_rand) over the
/// same quantity at ε-close pairs (I_local), plus the I_global objective.
///
/// norm_power 2 averages squared distances (the L² variant) and reports the
/// mean of squares, not its root.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fbasis/local_geometry.hpp"
#include "fbasis/synth_net.hpp"

namespace fbasis {

using ChartPair = std::pair<LocalChart, LocalChart>;

struct DistortionReport {
  double i_rand = 0.0;
  double i_local = 0.0;
  double distortion = 0.0;
  std::size_t pair_count = 0;
  double epsilon = 0.0;
  int norm_power = 1;
};

/// d^k_geo between the top-k Local Bases, k = min(k1, k2).
double tangent_pair_distance(const LocalChart& a, const LocalChart& b);

double i_rand(std::span<const ChartPair> pairs, int norm_power = 1);
double i_local(std::span<const ChartPair> pairs, int norm_power = 1);

/// Throws DegenerateLocalVariation when I_local < 1e−12.
DistortionReport distortion_from_pairs(std::span<const ChartPair> random_pairs,
                                       std::span<const ChartPair> local_pairs, int norm_power,
                                       double epsilon);

/// Random pairs z1, z2 ~ N(0, I); local pairs z1 ~ N(0, I), z2 = z1 + ε·u
/// with u uniform on the unit sphere. Deterministic from `seed`.
DistortionReport distortion(const SynthNet& net, double theta_pre, double epsilon,
                            std::size_t pair_count, std::uint64_t seed, int norm_power);

/// (1/√d_W)·mean d_geo(μ, T), or (1/d_W)·mean d_geo(μ, T)² when `squared`.
double i_global(const Frame& mu, std::span<const Frame> tangents, bool squared = false);

}  // namespace fbasis
