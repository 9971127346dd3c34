#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gcl/loss.hpp"

// Descriptors and the small trainable embedding network that produces them.
namespace gcl::embed {

// Pre-normalization norms below this produce a zero, degenerate descriptor.
inline constexpr double kDegenerateNorm = 1e-12;

struct Descriptor {
  Eigen::VectorXd values;
  bool normalized = false;
  // Normalization was requested but the vector had (near) zero norm.
  bool degenerate = false;
};

// L2-normalizes with safe division.
Descriptor normalized(Eigen::VectorXd values);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// Fully connected network: ReLU on hidden layers, identity on the output
// layer, optional L2 normalization of the output.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  // Throws InvalidInput unless 1..3 layers with chained dimensions.
  EmbeddingModel(std::vector<DenseLayer> layers, bool output_normalize);

  // dims = {input, hidden..., output}. Weights and biases are drawn from
  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static EmbeddingModel initialized(std::span<const std::size_t> dims, bool output_normalize,
                                    std::uint64_t seed);

  std::size_t input_dim() const { return layers_.front().weight.cols(); }
  std::size_t output_dim() const { return layers_.back().weight.rows(); }
  std::size_t parameter_count() const;
  bool output_normalize() const { return output_normalize_; }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  // Flat parameter view: per layer, weight in row-major order then bias.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);

 private:
  std::vector<DenseLayer> layers_;
  bool output_normalize_ = true;
};

// Same shapes as the model parameters.
struct ModelGradients {
  std::vector<DenseLayer> layers;

  static ModelGradients zeros_like(const EmbeddingModel& model);
  void add_scaled(const ModelGradients& other, double scale);
  void scale(double s);
  Eigen::VectorXd flatten() const;
};

// Intermediate values kept for the backward pass.
struct ForwardTrace {
  std::vector<Eigen::VectorXd> layer_inputs;
  std::vector<Eigen::VectorXd> pre_activations;
  double raw_norm = 0.0;
  Descriptor output;
};

Descriptor forward(const EmbeddingModel& model, const Eigen::VectorXd& input);
ForwardTrace forward_trace(const EmbeddingModel& model, const Eigen::VectorXd& input);

// Accumulates d(loss)/d(params) into `grads`, given d(loss)/d(output) for the
// branch recorded in `trace`.
void backward(const EmbeddingModel& model, const ForwardTrace& trace,
              const Eigen::VectorXd& grad_output, ModelGradients& grads);

struct PairBackward {
  double loss = 0.0;
  double distance = 0.0;
  ModelGradients grads;
};

// Siamese pass: both inputs go through the same weights and both branches
// accumulate into one gradient.
PairBackward backward_pair(const EmbeddingModel& model, const Eigen::VectorXd& input_a,
                           const Eigen::VectorXd& input_b, double psi,
                           const loss::LossConfig& cfg,
                           loss::LossKind kind = loss::LossKind::Generalized);

// Parameters minus lr * grads.
void sgd_step(EmbeddingModel& model, const ModelGradients& grads, double lr);

}  // namespace gcl::embed
