#include "gcl/retrieval.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "gcl/error.hpp"

namespace gcl::retrieval {

WhitenTransform fit_whitening(const Eigen::MatrixXd& map_rows, std::size_t output_dims) {
  const auto n = map_rows.rows();
  const auto dim = map_rows.cols();
  if (n < 2) throw InvalidInput("whitening needs at least 2 map descriptors");
  if (output_dims < 1 || output_dims > static_cast<std::size_t>(std::min(dim, n))) {
    throw InvalidInput("whitening output dims must be in [1, min(D, N)]");
  }

  WhitenTransform t;
  t.mean = map_rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = map_rows.rowwise() - t.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  if (cov.cwiseAbs().maxCoeff() == 0.0) {
    throw DegenerateInput("map descriptors are all identical; covariance is zero");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw RuntimeFailure("covariance eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  const auto k = static_cast<Eigen::Index>(output_dims);
  t.projection.resize(k, dim);
  t.eigenvalues.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index src = dim - 1 - i;
    const double lambda = std::max(solver.eigenvalues()(src), kEigenvalueFloor);
    t.eigenvalues(i) = solver.eigenvalues()(src);
    t.projection.row(i) = solver.eigenvectors().col(src).transpose() / std::sqrt(lambda);
  }
  return t;
}

Eigen::VectorXd project(const WhitenTransform& t, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != t.input_dim()) {
    throw InvalidInput("descriptor dimension does not match the whitening transform");
  }
  return t.projection * (x - t.mean);
}

embed::Descriptor apply_whitening(const WhitenTransform& t, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = project(t, x);
  if (t.renormalize) return embed::normalized(std::move(y));
  return embed::Descriptor{std::move(y), false, false};
}

RetrievalIndex::RetrievalIndex(std::vector<std::string> ids, Eigen::MatrixXd map_rows,
                               std::optional<std::size_t> whiten_dims, bool renormalize)
    : ids_(std::move(ids)), rows_(std::move(map_rows)) {
  check_ids();
  input_dim_ = static_cast<std::size_t>(rows_.cols());
  if (whiten_dims) {
    WhitenTransform t = fit_whitening(rows_, *whiten_dims);
    t.renormalize = renormalize;
    Eigen::MatrixXd out(rows_.rows(), static_cast<Eigen::Index>(t.output_dim()));
    for (Eigen::Index r = 0; r < rows_.rows(); ++r) {
      out.row(r) = apply_whitening(t, rows_.row(r).transpose()).values.transpose();
    }
    rows_ = std::move(out);
    whitening_ = std::move(t);
  }
}

RetrievalIndex::RetrievalIndex(std::vector<std::string> ids, Eigen::MatrixXd map_rows,
                               WhitenTransform whitening)
    : ids_(std::move(ids)), rows_(std::move(map_rows)) {
  check_ids();
  input_dim_ = static_cast<std::size_t>(rows_.cols());
  if (whitening.input_dim() != input_dim_) {
    throw InvalidInput("whitening transform does not match the descriptor dimension");
  }
  Eigen::MatrixXd out(rows_.rows(), static_cast<Eigen::Index>(whitening.output_dim()));
  for (Eigen::Index r = 0; r < rows_.rows(); ++r) {
    out.row(r) = apply_whitening(whitening, rows_.row(r).transpose()).values.transpose();
  }
  rows_ = std::move(out);
  whitening_ = std::move(whitening);
}

void RetrievalIndex::check_ids() {
  if (ids_.empty()) throw InvalidInput("retrieval index is empty");
  if (static_cast<Eigen::Index>(ids_.size()) != rows_.rows()) {
    throw InvalidInput("map ids and descriptor rows differ in count");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw InvalidInput("duplicate map id '" + id + "'");
  }
}

Eigen::VectorXd RetrievalIndex::prepare_query(const Eigen::VectorXd& query) const {
  if (static_cast<std::size_t>(query.size()) != input_dim_) {
    throw InvalidInput("query dimension " + std::to_string(query.size()) + " != index dimension " +
                       std::to_string(input_dim_));
  }
  if (whitening_) return apply_whitening(*whitening_, query).values;
  return query;
}

RankedMatches RetrievalIndex::search(const Eigen::VectorXd& query, std::size_t k) const {
  if (k == 0) throw InvalidInput("k must be at least 1");
  const Eigen::VectorXd q = prepare_query(query);
  const Eigen::VectorXd dist = (rows_.rowwise() - q.transpose()).rowwise().norm();

  std::vector<std::size_t> order(ids_.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t take = std::min(k, order.size());
  auto closer = [&](std::size_t a, std::size_t b) {
    const double da = dist(static_cast<Eigen::Index>(a));
    const double db = dist(static_cast<Eigen::Index>(b));
    if (da != db) return da < db;
    return ids_[a] < ids_[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    closer);
  RankedMatches out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({ids_[order[i]], dist(static_cast<Eigen::Index>(order[i]))});
  }
  return out;
}

RankedMatches search(const RetrievalIndex& index, const Eigen::VectorXd& query, std::size_t k) {
  return index.search(query, k);
}

}  // namespace gcl::retrieval
