#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Geometry>

#include "gcl/graded_pairs.hpp"
#include "gcl/pose.hpp"
#include "gcl/retrieval.hpp"

// Retrieval and localization metrics.
namespace gcl::eval {

// Positive iff within max_dist_m (inclusive) and max_angle_deg (inclusive).
struct GeoThreshold {
  double max_dist_m = 25.0;
  double max_angle_deg = 40.0;
};

// Positive iff psi > min_psi.
struct PsiThreshold {
  double min_psi = 0.5;
};

using PositiveCriterion = std::variant<GeoThreshold, PsiThreshold>;

// Pose used for scoring; either planar (heading) or 6DOF (quaternion).
struct PlacePose {
  std::string id;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::optional<double> heading_deg;
  std::optional<Eigen::Quaterniond> rotation;

  static PlacePose from(const CameraPose2D& p);
  static PlacePose from(const Pose6DOF& p);
};

double translation_error(const PlacePose& a, const PlacePose& b);
// Geodesic quaternion angle for 6DOF poses, absolute heading difference for
// planar ones. Mixing the two throws InvalidInput.
double rotation_error_deg(const PlacePose& a, const PlacePose& b);

class GroundTruth {
 public:
  GroundTruth() = default;

  static GroundTruth from_pairs(GradedPairSet pairs);
  static GroundTruth from_poses(std::vector<PlacePose> queries, std::vector<PlacePose> maps);
  // Adds (or replaces) the graded pairs of a pose-based ground truth.
  void set_pairs(GradedPairSet pairs);

  bool has_pairs() const { return pairs_.has_value(); }
  bool has_poses() const { return !query_poses_.empty(); }

  bool is_positive(const PositiveCriterion& c, const std::string& query_id,
                   const std::string& map_id) const;
  // Every map id that is a positive for the query. Throws InvalidInput when
  // the query is unknown to the ground truth the criterion needs.
  std::vector<std::string> positives(const PositiveCriterion& c, const std::string& query_id) const;

  const PlacePose& query_pose(const std::string& id) const;
  const PlacePose& map_pose(const std::string& id) const;
  std::span<const PlacePose> map_poses() const { return map_poses_; }
  double psi(const std::string& query_id, const std::string& map_id) const;

 private:
  std::optional<GradedPairSet> pairs_;
  std::vector<std::vector<PairRef>> pairs_by_query_;
  std::vector<PlacePose> query_poses_;
  std::vector<PlacePose> map_poses_;
  std::unordered_map<std::string, std::size_t> query_pose_index_;
  std::unordered_map<std::string, std::size_t> map_pose_index_;
};

struct QueryResult {
  std::string query_id;
  retrieval::RankedMatches matches;
};
using ResultSet = std::vector<QueryResult>;

enum class QueryFilter {
  WithPositives,  // queries without any positive in the map are not counted
  All,
};

// Fraction of counted queries with a positive among their top k, per k.
std::map<std::size_t, double> recall_at_k(const ResultSet& results, const PositiveCriterion& c,
                                          const GroundTruth& gt, std::span<const std::size_t> ks,
                                          QueryFilter filter = QueryFilter::WithPositives);

// Pairs ranked by ascending distance, equal distances put negatives first.
// AP = sum over positives of precision at that rank, divided by #positives.
// Throws DegenerateInput unless there is at least one positive and one negative.
double average_precision(std::span<const double> distances, std::span<const int> labels);

// AP over every retrieved (query, map) pair in the result lists.
double average_precision(const ResultSet& results, const PositiveCriterion& c,
                         const GroundTruth& gt);

struct LocalizationTier {
  double max_translation_m = 0.0;
  double max_rotation_deg = 0.0;
};

std::vector<LocalizationTier> default_tiers();

// Each query inherits the pose of its top-1 match; per tier, the fraction of
// queries whose errors are within both thresholds.
std::vector<double> localized_fraction(const ResultSet& results, const GroundTruth& gt,
                                       std::span<const LocalizationTier> tiers);

enum class SweepAxis {
  Distance,  // positive iff position distance <= threshold
  Psi,       // positive iff psi > threshold
};

struct SweepPoint {
  double threshold = 0.0;
  double recall = 0.0;
};

// Recall@k (default 5) at each threshold over all queries.
std::vector<SweepPoint> threshold_sweep(const ResultSet& results, const GroundTruth& gt,
                                        SweepAxis axis, std::span<const double> grid,
                                        std::size_t k = 5);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace gcl::eval
