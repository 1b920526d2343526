#pragma once

/// @file
/// Small dense tanh networks with exact Jacobians, used as a ground-truth
/// latent manifold at desk scale.

#include <cstdint>
#include <string>
#include <vector>

#include "fbasis/frames.hpp"
#include "fbasis/local_geometry.hpp"

namespace fbasis {

enum class Activation { Identity, Tanh };

struct DenseLayer {
  Matrix weight;  // out × in
  Vector bias;
  Activation activation = Activation::Tanh;
};

struct SynthNetSpec {
  /// widths[0] is the input dimension; one layer per consecutive pair.
  std::vector<int> widths;
  Activation activation = Activation::Tanh;
  /// Leaves the last layer affine.
  bool linear_output = false;
  /// Weight entries ~ N(0, weight_scale² / fan_in).
  double weight_scale = 1.0;
  double bias_scale = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

class SynthNet {
 public:
  explicit SynthNet(const SynthNetSpec& spec);
  explicit SynthNet(std::vector<DenseLayer> layers);

  /// f(z) = A z.
  static SynthNet linear(Matrix a);

  Eigen::Index input_dim() const { return layers_.front().weight.cols(); }
  Eigen::Index output_dim() const { return layers_.back().weight.rows(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  Vector forward(const Vector& z) const;
  /// Exact chain rule: Π diag(σ'(a_l)) W_l.
  Matrix jacobian(const Vector& z) const;
  JacobianSample sample_at(const Vector& z) const;

 private:
  std::vector<DenseLayer> layers_;
};

Vector synth_forward(const SynthNetSpec& spec, const Vector& z);
Matrix synth_jacobian(const SynthNetSpec& spec, const Vector& z);

/// `count` Jacobians at z ~ N(0, I), deterministic from `seed`.
std::vector<JacobianSample> sample_jacobians(const SynthNet& net, std::size_t count,
                                             std::uint64_t seed);

}  // namespace fbasis
