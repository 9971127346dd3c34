#include "gcl/train.hpp"

#include <cmath>

#include "gcl/error.hpp"

namespace gcl::train {

double TrainConfig::effective_initial_lr() const {
  if (initial_lr) return *initial_lr;
  return loss_kind == loss::LossKind::Generalized ? 0.1 : 0.01;
}

void TrainConfig::validate() const {
  loss_config().validate();
  const double lr0 = effective_initial_lr();
  if (!(lr0 >= 0.0) || !std::isfinite(lr0)) throw InvalidInput("learning rate must be >= 0");
  if (!(lr_decay_factor > 0.0)) throw InvalidInput("decay factor must be positive");
  if (decay_every_pairs == 0) throw InvalidInput("decay interval must be positive");
  if (batch_size == 0) throw InvalidInput("batch size must be positive");
}

double lr_at(std::size_t pairs_seen, const TrainConfig& cfg) {
  const std::size_t steps = pairs_seen / cfg.decay_every_pairs;
  return cfg.effective_initial_lr() / std::pow(cfg.lr_decay_factor, static_cast<double>(steps));
}

FeatureTable::FeatureTable(std::vector<std::string> ids, Eigen::MatrixXd features)
    : ids_(std::move(ids)), features_(std::move(features)) {
  if (static_cast<Eigen::Index>(ids_.size()) != features_.rows()) {
    throw InvalidInput("feature ids and rows differ in count");
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!lookup_.emplace(ids_[i], i).second) throw InvalidInput("duplicate feature id '" + ids_[i] + "'");
  }
}

std::size_t FeatureTable::row_of(const std::string& id) const {
  const auto it = lookup_.find(id);
  if (it == lookup_.end()) throw InvalidInput("id '" + id + "' not found in feature store");
  return it->second;
}

BatchGradient batch_gradient(const embed::EmbeddingModel& model, const mining::Batch& batch,
                             const FeatureTable& features,
                             const std::vector<std::size_t>& query_rows,
                             const std::vector<std::size_t>& map_rows, const TrainConfig& cfg) {
  BatchGradient out;
  out.grads = embed::ModelGradients::zeros_like(model);
  if (batch.pairs.empty()) return out;
  const loss::LossConfig lc = cfg.loss_config();
  double loss_sum = 0.0;
  for (const PairRef& p : batch.pairs) {
    const embed::PairBackward pb =
        embed::backward_pair(model, features.row(query_rows[p.query]),
                             features.row(map_rows[p.map]), p.psi, lc, cfg.loss_kind);
    loss_sum += pb.loss;
    out.grads.add_scaled(pb.grads, 1.0);
  }
  const double inv = 1.0 / static_cast<double>(batch.pairs.size());
  out.grads.scale(inv);
  out.mean_loss = loss_sum * inv;
  return out;
}

TrainReport train(embed::EmbeddingModel model, const GradedPairSet& pairs,
                  const FeatureTable& features, const TrainConfig& cfg,
                  const CheckpointFn& on_checkpoint) {
  cfg.validate();
  if (features.dim() != model.input_dim()) {
    throw InvalidInput("feature dimension " + std::to_string(features.dim()) +
                       " != model input " + std::to_string(model.input_dim()));
  }
  if (!features.matrix().allFinite()) throw InvalidInput("feature store contains non-finite values");
  std::vector<std::size_t> query_rows;
  std::vector<std::size_t> map_rows;
  for (const auto& id : pairs.query_ids()) query_rows.push_back(features.row_of(id));
  for (const auto& id : pairs.map_ids()) map_rows.push_back(features.row_of(id));

  TrainReport report;
  if (cfg.epochs > 0) {
    mining::EpochSampler sampler(pairs, cfg.strategy, cfg.batch_size, cfg.seed);
    std::size_t batch_no = 0;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
      for (std::size_t b = 0; b < sampler.batches_per_epoch(); ++b) {
        const mining::Batch batch = sampler.next();
        const double lr = lr_at(report.pairs_seen, cfg);
        BatchGradient bg;
        try {
          bg = batch_gradient(model, batch, features, query_rows, map_rows, cfg);
        } catch (const InvalidInput& e) {
          // Inputs were checked above, so a bad distance here means the weights blew up.
          if (batch_no == 0) throw;
          throw RuntimeFailure("training diverged at batch " + std::to_string(batch_no + 1) + ": " +
                               e.what());
        }
        if (!std::isfinite(bg.mean_loss)) {
          throw RuntimeFailure("non-finite loss at batch " + std::to_string(batch_no + 1) +
                               " (lr " + std::to_string(lr) + ")");
        }
        embed::sgd_step(model, bg.grads, lr);
        ++batch_no;
        // Overflowed weights are a training failure, not bad input.
        if (!model.flatten().allFinite()) {
          throw RuntimeFailure("parameters diverged at batch " + std::to_string(batch_no) +
                               " (lr " + std::to_string(lr) + ")");
        }
        report.pairs_seen += batch.pairs.size();
        report.trace.push_back({batch_no, report.pairs_seen, lr, bg.mean_loss});
        if (on_checkpoint && cfg.checkpoint_every > 0 && batch_no % cfg.checkpoint_every == 0) {
          on_checkpoint(model, batch_no);
        }
      }
    }
  }
  report.model = std::move(model);
  return report;
}

}  // namespace gcl::train
