#include "fbasis/synth_net.hpp"

#include <cmath>
#include <random>

#include "fbasis/error.hpp"

namespace fbasis {

void SynthNetSpec::validate() const {
  if (widths.size() < 2) throw Error(ErrorKind::InvalidArgument, "network needs at least one layer");
  for (int w : widths) {
    if (w < 1) throw Error(ErrorKind::InvalidArgument, "layer widths must be positive");
  }
  if (!(weight_scale > 0.0) || !(bias_scale >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "weight scale must be positive, bias scale nonnegative");
  }
}

SynthNet::SynthNet(const SynthNetSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 1; l < spec.widths.size(); ++l) {
    const int in = spec.widths[l - 1];
    const int out = spec.widths[l];
    DenseLayer layer;
    layer.weight.resize(out, in);
    layer.bias.resize(out);
    const double scale = spec.weight_scale / std::sqrt(static_cast<double>(in));
    for (int i = 0; i < out; ++i) {
      for (int j = 0; j < in; ++j) layer.weight(i, j) = scale * normal(rng);
    }
    for (int i = 0; i < out; ++i) layer.bias(i) = spec.bias_scale * normal(rng);
    const bool last = l + 1 == spec.widths.size();
    layer.activation = (last && spec.linear_output) ? Activation::Identity : spec.activation;
    layers_.push_back(std::move(layer));
  }
}

SynthNet::SynthNet(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorKind::InvalidArgument, "network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    if (layer.bias.size() != layer.weight.rows() ||
        (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows())) {
      throw Error(ErrorKind::DimensionMismatch, "layer " + std::to_string(l) + " shape");
    }
  }
}

SynthNet SynthNet::linear(Matrix a) {
  DenseLayer layer{std::move(a), Vector(), Activation::Identity};
  layer.bias = Vector::Zero(layer.weight.rows());
  return SynthNet(std::vector<DenseLayer>{std::move(layer)});
}

Vector SynthNet::forward(const Vector& z) const {
  if (z.size() != input_dim()) throw Error(ErrorKind::DimensionMismatch, "input length");
  Vector h = z;
  for (const DenseLayer& layer : layers_) {
    h = layer.weight * h + layer.bias;
    if (layer.activation == Activation::Tanh) h = h.array().tanh().matrix();
  }
  return h;
}

Matrix SynthNet::jacobian(const Vector& z) const {
  if (z.size() != input_dim()) throw Error(ErrorKind::DimensionMismatch, "input length");
  Vector h = z;
  Matrix jac = Matrix::Identity(z.size(), z.size());
  for (const DenseLayer& layer : layers_) {
    const Vector pre = layer.weight * h + layer.bias;
    jac = layer.weight * jac;
    if (layer.activation == Activation::Tanh) {
      h = pre.array().tanh().matrix();
      const Vector slope = (1.0 - h.array().square()).matrix();
      jac = slope.asDiagonal() * jac;
    } else {
      h = pre;
    }
  }
  return jac;
}

JacobianSample SynthNet::sample_at(const Vector& z) const {
  return JacobianSample{z, jacobian(z), forward(z)};
}

Vector synth_forward(const SynthNetSpec& spec, const Vector& z) { return SynthNet(spec).forward(z); }

Matrix synth_jacobian(const SynthNetSpec& spec, const Vector& z) { return SynthNet(spec).jacobian(z); }

std::vector<JacobianSample> sample_jacobians(const SynthNet& net, std::size_t count,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<JacobianSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector z(net.input_dim());
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = normal(rng);
    out.push_back(net.sample_at(z));
  }
  return out;
}

}  // namespace fbasis
