#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gcl/embed.hpp"

// Exhaustive nearest-neighbor search with optional PCA whitening fitted on
// the map descriptors.
namespace gcl::retrieval {

// Eigenvalues below this are clamped before the inverse square root.
inline constexpr double kEigenvalueFloor = 1e-12;

struct WhitenTransform {
  Eigen::VectorXd mean;          // D
  Eigen::MatrixXd projection;    // output_dims x D, rows = eigvec / sqrt(eigval)
  Eigen::VectorXd eigenvalues;   // descending, output_dims
  bool renormalize = true;       // L2-normalize after projecting

  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(projection.rows()); }
};

// Rows of `map_rows` are descriptors. Sample covariance uses N - 1.
// Throws InvalidInput when N < 2 or output_dims is not in [1, min(D, N)], and
// DegenerateInput when all descriptors are identical.
WhitenTransform fit_whitening(const Eigen::MatrixXd& map_rows, std::size_t output_dims);

// projection * (x - mean), without renormalization.
Eigen::VectorXd project(const WhitenTransform& t, const Eigen::VectorXd& x);

// Projection followed by L2 normalization when t.renormalize is set.
embed::Descriptor apply_whitening(const WhitenTransform& t, const Eigen::VectorXd& x);

struct Match {
  std::string map_id;
  double distance = 0.0;
};

// Ascending distance, ties by ascending map id.
using RankedMatches = std::vector<Match>;

class RetrievalIndex {
 public:
  // Throws InvalidInput for duplicate ids, a row/id count mismatch or an
  // empty map. When whiten_dims is set the transform is fitted on these rows
  // only and applied to them.
  RetrievalIndex(std::vector<std::string> ids, Eigen::MatrixXd map_rows,
                 std::optional<std::size_t> whiten_dims = std::nullopt,
                 bool renormalize = true);

  // Wraps an already fitted transform (e.g. loaded from disk).
  RetrievalIndex(std::vector<std::string> ids, Eigen::MatrixXd map_rows, WhitenTransform whitening);

  std::size_t size() const { return ids_.size(); }
  std::size_t input_dim() const { return input_dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  // Rows in the searched space (whitened if a transform is present).
  const Eigen::MatrixXd& rows() const { return rows_; }
  const std::optional<WhitenTransform>& whitening() const { return whitening_; }

  // Maps a raw query descriptor into the searched space.
  Eigen::VectorXd prepare_query(const Eigen::VectorXd& query) const;

  // Exact k nearest maps; k larger than the index returns everything.
  RankedMatches search(const Eigen::VectorXd& query, std::size_t k) const;

 private:
  void check_ids();

  std::vector<std::string> ids_;
  Eigen::MatrixXd rows_;
  std::size_t input_dim_ = 0;
  std::optional<WhitenTransform> whitening_;
};

RankedMatches search(const RetrievalIndex& index, const Eigen::VectorXd& query, std::size_t k);

}  // namespace gcl::retrieval
