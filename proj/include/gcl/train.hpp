#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "gcl/embed.hpp"
#include "gcl/graded_pairs.hpp"
#include "gcl/loss.hpp"
#include "gcl/mining.hpp"

// Plain SGD over mined batches with a step learning-rate schedule.
namespace gcl::train {

struct TrainConfig {
  loss::LossKind loss_kind = loss::LossKind::Generalized;
  // Unset means 0.1 for the generalized loss and 0.01 for the binary one.
  std::optional<double> initial_lr;
  double lr_decay_factor = 10.0;
  std::size_t decay_every_pairs = 250000;
  std::size_t batch_size = 64;
  double margin_tau = 0.5;
  double positive_threshold = 0.5;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  mining::BatchStrategy strategy = mining::BatchStrategy::A;
  // Invoke on_checkpoint every this many batches; 0 disables.
  std::size_t checkpoint_every = 0;

  double effective_initial_lr() const;
  loss::LossConfig loss_config() const { return {margin_tau, positive_threshold}; }
  void validate() const;
};

// initial_lr / decay^floor(pairs_seen / decay_every_pairs)
double lr_at(std::size_t pairs_seen, const TrainConfig& cfg);

// Input feature vectors by image id.
class FeatureTable {
 public:
  FeatureTable() = default;
  // Rows of `features` correspond to `ids`. Throws on duplicates or size mismatch.
  FeatureTable(std::vector<std::string> ids, Eigen::MatrixXd features);

  std::size_t dim() const { return static_cast<std::size_t>(features_.cols()); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::MatrixXd& matrix() const { return features_; }
  // Throws InvalidInput for unknown ids.
  std::size_t row_of(const std::string& id) const;
  Eigen::VectorXd row(std::size_t r) const { return features_.row(static_cast<Eigen::Index>(r)).transpose(); }

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd features_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

struct BatchRecord {
  std::size_t batch = 0;       // 1-based
  std::size_t pairs_seen = 0;  // after this batch
  double lr = 0.0;
  double loss = 0.0;           // mean over the batch
};

struct TrainReport {
  std::vector<BatchRecord> trace;
  std::size_t pairs_seen = 0;
  embed::EmbeddingModel model;
};

// Mean of the per-pair gradients of one batch, summed in batch order.
struct BatchGradient {
  double mean_loss = 0.0;
  embed::ModelGradients grads;
};

BatchGradient batch_gradient(const embed::EmbeddingModel& model, const mining::Batch& batch,
                             const FeatureTable& features,
                             const std::vector<std::size_t>& query_rows,
                             const std::vector<std::size_t>& map_rows, const TrainConfig& cfg);

using CheckpointFn = std::function<void(const embed::EmbeddingModel&, std::size_t batch)>;

// Throws InvalidInput for ids missing from `features` and RuntimeFailure when
// a batch loss is not finite.
TrainReport train(embed::EmbeddingModel model, const GradedPairSet& pairs,
                  const FeatureTable& features, const TrainConfig& cfg,
                  const CheckpointFn& on_checkpoint = {});

}  // namespace gcl::train
