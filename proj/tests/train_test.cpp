#include "gcl/train.hpp"

#include <gtest/gtest.h>

#include "gcl/error.hpp"
#include "gcl/geom2d.hpp"
#include "gcl/synth.hpp"

using namespace gcl;
using train::TrainConfig;

namespace {

struct Fixture {
  GradedPairSet pairs;
  train::FeatureTable features;
};

Fixture small_city(std::uint64_t seed = 2) {
  synth::CityOptions o;
  o.maps = 64;
  o.queries = 1;
  o.train_queries = 48;
  o.feature_dim = 16;
  o.seed = seed;
  const auto s = synth::city2d(o);
  Fixture f{geom2d::pairwise_similarity_matrix(s.train_queries, s.maps), {}};
  std::vector<std::string> ids;
  Eigen::MatrixXd rows(s.train_features.rows() + s.map_features.rows(), s.map_features.cols());
  rows << s.train_features, s.map_features;
  for (const auto& p : s.train_queries) ids.push_back(p.id);
  for (const auto& p : s.maps) ids.push_back(p.id);
  f.features = train::FeatureTable(std::move(ids), std::move(rows));
  return f;
}

embed::EmbeddingModel small_model(std::uint64_t seed = 7) {
  return embed::EmbeddingModel::initialized(std::vector<std::size_t>{16, 24, 8}, true, seed);
}

}  // namespace

TEST(LearningRate, StepSchedule) {
  TrainConfig cfg;
  EXPECT_DOUBLE_EQ(train::lr_at(0, cfg), 0.1);
  EXPECT_DOUBLE_EQ(train::lr_at(249999, cfg), 0.1);
  EXPECT_DOUBLE_EQ(train::lr_at(250000, cfg), 0.01);
  EXPECT_DOUBLE_EQ(train::lr_at(499999, cfg), 0.01);
  EXPECT_NEAR(train::lr_at(500000, cfg), 0.001, 1e-18);
  cfg.loss_kind = loss::LossKind::Contrastive;
  EXPECT_DOUBLE_EQ(train::lr_at(0, cfg), 0.01);
  cfg.initial_lr = 0.5;
  EXPECT_DOUBLE_EQ(train::lr_at(10, cfg), 0.5);
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.initial_lr = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.margin_tau = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(FeatureTable, LookupAndErrors) {
  const train::FeatureTable t({"a", "b"}, Eigen::MatrixXd::Identity(2, 3));
  EXPECT_EQ(t.row_of("b"), 1u);
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_THROW(t.row_of("c"), InvalidInput);
  EXPECT_THROW(train::FeatureTable({"a", "a"}, Eigen::MatrixXd::Zero(2, 1)), InvalidInput);
  EXPECT_THROW(train::FeatureTable({"a"}, Eigen::MatrixXd::Zero(2, 1)), InvalidInput);
}

TEST(Train, ZeroEpochsReturnsModelUnchanged) {
  const auto f = small_city();
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto model = small_model();
  const auto r = train::train(model, f.pairs, f.features, cfg);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.model.flatten(), model.flatten());
}

TEST(Train, ZeroLearningRateLeavesWeights) {
  const auto f = small_city();
  TrainConfig cfg;
  cfg.initial_lr = 0.0;
  const auto model = small_model();
  const auto r = train::train(model, f.pairs, f.features, cfg);
  EXPECT_FALSE(r.trace.empty());
  EXPECT_EQ(r.model.flatten(), model.flatten());
}

TEST(Train, TraceBookkeeping) {
  const auto f = small_city();
  TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.decay_every_pairs = 640;
  const auto r = train::train(small_model(), f.pairs, f.features, cfg);
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    EXPECT_EQ(r.trace[i].batch, i + 1);
    EXPECT_EQ(r.trace[i].pairs_seen, 32 * (i + 1));
    EXPECT_DOUBLE_EQ(r.trace[i].lr, train::lr_at(32 * i, cfg));
  }
  EXPECT_EQ(r.pairs_seen, r.trace.back().pairs_seen);
}

TEST(Train, MeanLossFallsOverEarlyBatches) {
  const auto f = small_city();
  TrainConfig cfg;
  cfg.epochs = 3;
  const auto r = train::train(small_model(), f.pairs, f.features, cfg);
  ASSERT_GE(r.trace.size(), 100u);
  double first = 0.0, later = 0.0;
  for (std::size_t i = 0; i < 10; ++i) first += r.trace[i].loss;
  for (std::size_t i = 40; i < 50; ++i) later += r.trace[i].loss;
  EXPECT_LT(later, first);
}

TEST(Train, SmallStepAlongBatchGradientLowersBatchLoss) {
  const auto f = small_city();
  const TrainConfig cfg;
  const auto model = small_model();
  std::vector<std::size_t> qrows, mrows;
  for (const auto& id : f.pairs.query_ids()) qrows.push_back(f.features.row_of(id));
  for (const auto& id : f.pairs.map_ids()) mrows.push_back(f.features.row_of(id));
  const auto batch = mining::sample_batch(f.pairs, cfg.strategy, 64, 5);
  const auto g = train::batch_gradient(model, batch, f.features, qrows, mrows, cfg);
  auto stepped = model;
  embed::sgd_step(stepped, g.grads, 1e-3);
  const auto after = train::batch_gradient(stepped, batch, f.features, qrows, mrows, cfg);
  EXPECT_LT(after.mean_loss, g.mean_loss);
}

TEST(Train, BatchGradientIsMeanOfPairGradients) {
  const auto f = small_city();
  TrainConfig cfg;
  cfg.loss_kind = loss::LossKind::Contrastive;
  const auto model = small_model();
  std::vector<std::size_t> qrows, mrows;
  for (const auto& id : f.pairs.query_ids()) qrows.push_back(f.features.row_of(id));
  for (const auto& id : f.pairs.map_ids()) mrows.push_back(f.features.row_of(id));
  const auto batch = mining::sample_batch(f.pairs, mining::BatchStrategy::B, 20, 1);
  const auto g = train::batch_gradient(model, batch, f.features, qrows, mrows, cfg);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.parameter_count()));
  double loss_sum = 0.0;
  for (const auto& p : batch.pairs) {
    const auto pb = embed::backward_pair(model, f.features.row(qrows[p.query]), f.features.row(mrows[p.map]),
                                         p.psi, cfg.loss_config(), cfg.loss_kind);
    sum += pb.grads.flatten();
    loss_sum += pb.loss;
  }
  EXPECT_LE((g.grads.flatten() - sum / 20.0).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(g.mean_loss, loss_sum / 20.0, 1e-14);
}

TEST(Train, ReproducibleForSeed) {
  const auto f = small_city();
  TrainConfig cfg;
  cfg.seed = 11;
  const auto a = train::train(small_model(), f.pairs, f.features, cfg);
  const auto b = train::train(small_model(), f.pairs, f.features, cfg);
  EXPECT_EQ(a.model.flatten(), b.model.flatten());
  cfg.seed = 12;
  const auto c = train::train(small_model(), f.pairs, f.features, cfg);
  EXPECT_NE(a.model.flatten(), c.model.flatten());
}

TEST(Train, CheckpointCallbackCadence) {
  const auto f = small_city();
  TrainConfig cfg;
  cfg.checkpoint_every = 7;
  std::vector<std::size_t> seen;
  const auto r = train::train(small_model(), f.pairs, f.features, cfg,
                              [&](const embed::EmbeddingModel&, std::size_t b) { seen.push_back(b); });
  ASSERT_FALSE(seen.empty());
  EXPECT_EQ(seen.size(), r.trace.size() / 7);
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], 7 * (i + 1));
}

TEST(Train, MissingFeatureIdsRejected) {
  const auto f = small_city();
  const train::FeatureTable partial({f.features.ids()[0]}, f.features.matrix().topRows(1));
  EXPECT_THROW(train::train(small_model(), f.pairs, partial, {}), InvalidInput);
}

TEST(Train, DimensionMismatchRejected) {
  const auto f = small_city();
  const auto wrong = embed::EmbeddingModel::initialized(std::vector<std::size_t>{5, 3}, true, 1);
  EXPECT_THROW(train::train(wrong, f.pairs, f.features, {}), InvalidInput);
}

TEST(Train, DivergenceIsRuntimeFailure) {
  const auto f = small_city();
  TrainConfig cfg;
  cfg.initial_lr = 1e200;
  const auto raw = embed::EmbeddingModel::initialized(std::vector<std::size_t>{16, 24, 8}, false, 3);
  EXPECT_THROW(train::train(raw, f.pairs, f.features, cfg), RuntimeFailure);
}
