#include "gcl/embed.hpp"

#include <cmath>

#include "gcl/error.hpp"
#include "gcl/rng.hpp"

namespace gcl::embed {

Descriptor normalized(Eigen::VectorXd values) {
  Descriptor d;
  d.normalized = true;
  const double n = values.norm();
  if (n < kDegenerateNorm) {
    d.degenerate = true;
    d.values = Eigen::VectorXd::Zero(values.size());
  } else {
    d.values = values / n;
  }
  return d;
}

EmbeddingModel::EmbeddingModel(std::vector<DenseLayer> layers, bool output_normalize)
    : layers_(std::move(layers)), output_normalize_(output_normalize) {
  if (layers_.empty() || layers_.size() > 3) throw InvalidInput("model needs 1 to 3 layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    if (layer.weight.rows() == 0 || layer.weight.cols() == 0) {
      throw InvalidInput("layer dimensions must be positive");
    }
    if (layer.bias.size() != layer.weight.rows()) throw InvalidInput("bias size mismatch");
    if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows()) {
      throw InvalidInput("consecutive layer dimensions do not chain");
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw InvalidInput("model parameters must be finite");
    }
  }
}

EmbeddingModel EmbeddingModel::initialized(std::span<const std::size_t> dims,
                                           bool output_normalize, std::uint64_t seed) {
  if (dims.size() < 2) throw InvalidInput("need at least input and output dimensions");
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(dims[l]);
    const auto out = static_cast<Eigen::Index>(dims[l + 1]);
    if (in == 0 || out == 0) throw InvalidInput("layer dimensions must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index r = 0; r < out; ++r) layer.bias(r) = rng.uniform(-bound, bound);
    layers.push_back(std::move(layer));
  }
  return EmbeddingModel(std::move(layers), output_normalize);
}

std::size_t EmbeddingModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

namespace {

Eigen::VectorXd flatten_layers(const std::vector<DenseLayer>& layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  Eigen::VectorXd flat(static_cast<Eigen::Index>(n));
  Eigen::Index k = 0;
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat(k++) = l.weight(r, c);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat(k++) = l.bias(r);
  }
  return flat;
}

}  // namespace

Eigen::VectorXd EmbeddingModel::flatten() const { return flatten_layers(layers_); }

void EmbeddingModel::assign(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw InvalidInput("parameter vector has the wrong length");
  }
  Eigen::Index k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat(k++);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat(k++);
  }
}

ModelGradients ModelGradients::zeros_like(const EmbeddingModel& model) {
  ModelGradients g;
  for (const auto& l : model.layers()) {
    g.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

void ModelGradients::add_scaled(const ModelGradients& other, double s) {
  if (other.layers.size() != layers.size()) throw InvalidInput("gradient shapes differ");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weight += s * other.layers[l].weight;
    layers[l].bias += s * other.layers[l].bias;
  }
}

void ModelGradients::scale(double s) {
  for (auto& l : layers) {
    l.weight *= s;
    l.bias *= s;
  }
}

Eigen::VectorXd ModelGradients::flatten() const { return flatten_layers(layers); }

ForwardTrace forward_trace(const EmbeddingModel& model, const Eigen::VectorXd& input) {
  if (static_cast<std::size_t>(input.size()) != model.input_dim()) {
    throw InvalidInput("input dimension " + std::to_string(input.size()) + " != model input " +
                       std::to_string(model.input_dim()));
  }
  const auto& layers = model.layers();
  ForwardTrace t;
  t.layer_inputs.reserve(layers.size());
  t.pre_activations.reserve(layers.size());
  Eigen::VectorXd x = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::VectorXd z = layers[l].weight * x + layers[l].bias;
    t.layer_inputs.push_back(std::move(x));
    const bool hidden = l + 1 < layers.size();
    x = hidden ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
    t.pre_activations.push_back(std::move(z));
  }
  t.raw_norm = x.norm();
  if (model.output_normalize()) {
    t.output = normalized(std::move(x));
  } else {
    t.output.values = std::move(x);
  }
  return t;
}

Descriptor forward(const EmbeddingModel& model, const Eigen::VectorXd& input) {
  return forward_trace(model, input).output;
}

void backward(const EmbeddingModel& model, const ForwardTrace& trace,
              const Eigen::VectorXd& grad_output, ModelGradients& grads) {
  const auto& layers = model.layers();
  Eigen::VectorXd g;
  if (model.output_normalize()) {
    if (trace.output.degenerate) return;
    // d(z/|z|)/dz = (I - y y^T) / |z|
    const Eigen::VectorXd& y = trace.output.values;
    g = (grad_output - y * y.dot(grad_output)) / trace.raw_norm;
  } else {
    g = grad_output;
  }
  for (std::size_t l = layers.size(); l-- > 0;) {
    if (l + 1 < layers.size()) {
      // ReLU; the subgradient at 0 is 0.
      g.array() *= (trace.pre_activations[l].array() > 0.0).cast<double>();
    }
    grads.layers[l].weight.noalias() += g * trace.layer_inputs[l].transpose();
    grads.layers[l].bias += g;
    if (l > 0) g = layers[l].weight.transpose() * g;
  }
}

PairBackward backward_pair(const EmbeddingModel& model, const Eigen::VectorXd& input_a,
                           const Eigen::VectorXd& input_b, double psi,
                           const loss::LossConfig& cfg, loss::LossKind kind) {
  const ForwardTrace ta = forward_trace(model, input_a);
  const ForwardTrace tb = forward_trace(model, input_b);
  const loss::DescriptorGradients dg =
      loss::gcl_descriptor_gradients(ta.output.values, tb.output.values, psi, cfg, kind);
  PairBackward out;
  out.loss = dg.loss;
  out.distance = (ta.output.values - tb.output.values).norm();
  out.grads = ModelGradients::zeros_like(model);
  backward(model, ta, dg.grad_a, out.grads);
  backward(model, tb, dg.grad_b, out.grads);
  return out;
}

void sgd_step(EmbeddingModel& model, const ModelGradients& grads, double lr) {
  auto& layers = model.layers();
  if (grads.layers.size() != layers.size()) throw InvalidInput("gradient shapes differ");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weight -= lr * grads.layers[l].weight;
    layers[l].bias -= lr * grads.layers[l].bias;
  }
}

}  // namespace gcl::embed
