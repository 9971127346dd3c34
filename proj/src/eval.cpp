#include "gcl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcl/error.hpp"

namespace gcl::eval {

PlacePose PlacePose::from(const CameraPose2D& p) {
  PlacePose out;
  out.id = p.id;
  out.position = {p.t0, p.t1, 0.0};
  out.heading_deg = p.heading_deg;
  return out;
}

PlacePose PlacePose::from(const Pose6DOF& p) {
  PlacePose out;
  out.id = p.id;
  out.position = p.translation;
  out.rotation = p.rotation;
  return out;
}

double translation_error(const PlacePose& a, const PlacePose& b) {
  return (a.position - b.position).norm();
}

double rotation_error_deg(const PlacePose& a, const PlacePose& b) {
  if (a.rotation && b.rotation) return rotation_difference_deg(*a.rotation, *b.rotation);
  if (a.heading_deg && b.heading_deg) return heading_difference_deg(*a.heading_deg, *b.heading_deg);
  throw InvalidInput("cannot compare planar and 6DOF orientations");
}

GroundTruth GroundTruth::from_pairs(GradedPairSet pairs) {
  GroundTruth gt;
  gt.set_pairs(std::move(pairs));
  return gt;
}

void GroundTruth::set_pairs(GradedPairSet pairs) {
  pairs_by_query_.assign(pairs.query_ids().size(), {});
  for (const PairRef& p : pairs.stored()) pairs_by_query_[p.query].push_back(p);
  pairs_ = std::move(pairs);
}

GroundTruth GroundTruth::from_poses(std::vector<PlacePose> queries, std::vector<PlacePose> maps) {
  GroundTruth gt;
  gt.query_poses_ = std::move(queries);
  gt.map_poses_ = std::move(maps);
  for (std::size_t i = 0; i < gt.query_poses_.size(); ++i) {
    if (!gt.query_pose_index_.emplace(gt.query_poses_[i].id, i).second) {
      throw InvalidInput("duplicate query pose '" + gt.query_poses_[i].id + "'");
    }
  }
  for (std::size_t i = 0; i < gt.map_poses_.size(); ++i) {
    if (!gt.map_pose_index_.emplace(gt.map_poses_[i].id, i).second) {
      throw InvalidInput("duplicate map pose '" + gt.map_poses_[i].id + "'");
    }
  }
  return gt;
}

const PlacePose& GroundTruth::query_pose(const std::string& id) const {
  const auto it = query_pose_index_.find(id);
  if (it == query_pose_index_.end()) throw InvalidInput("no pose for query '" + id + "'");
  return query_poses_[it->second];
}

const PlacePose& GroundTruth::map_pose(const std::string& id) const {
  const auto it = map_pose_index_.find(id);
  if (it == map_pose_index_.end()) throw InvalidInput("no pose for map '" + id + "'");
  return map_poses_[it->second];
}

double GroundTruth::psi(const std::string& query_id, const std::string& map_id) const {
  if (!pairs_) throw InvalidInput("ground truth has no graded pairs");
  const std::uint32_t q = pairs_->query_index(query_id);
  // Map ids outside the annotated universe never overlap.
  const auto m = pairs_->find_map(map_id);
  return m ? pairs_->psi(q, *m) : 0.0;
}

namespace {

bool geo_match(const GeoThreshold& g, const PlacePose& q, const PlacePose& m) {
  return translation_error(q, m) <= g.max_dist_m && rotation_error_deg(q, m) <= g.max_angle_deg;
}

}  // namespace

bool GroundTruth::is_positive(const PositiveCriterion& c, const std::string& query_id,
                              const std::string& map_id) const {
  if (const auto* g = std::get_if<GeoThreshold>(&c)) {
    return geo_match(*g, query_pose(query_id), map_pose(map_id));
  }
  return psi(query_id, map_id) > std::get<PsiThreshold>(c).min_psi;
}

std::vector<std::string> GroundTruth::positives(const PositiveCriterion& c,
                                                const std::string& query_id) const {
  std::vector<std::string> out;
  if (const auto* g = std::get_if<GeoThreshold>(&c)) {
    const PlacePose& q = query_pose(query_id);
    for (const PlacePose& m : map_poses_) {
      if (geo_match(*g, q, m)) out.push_back(m.id);
    }
    return out;
  }
  if (!pairs_) throw InvalidInput("psi criterion needs graded-pair ground truth");
  const double t = std::get<PsiThreshold>(c).min_psi;
  const std::uint32_t q = pairs_->query_index(query_id);
  for (const PairRef& p : pairs_by_query_[q]) {
    if (p.psi > t) out.push_back(pairs_->map_ids()[p.map]);
  }
  return out;
}

std::map<std::size_t, double> recall_at_k(const ResultSet& results, const PositiveCriterion& c,
                                          const GroundTruth& gt, std::span<const std::size_t> ks,
                                          QueryFilter filter) {
  std::map<std::size_t, std::size_t> hits;
  for (std::size_t k : ks) {
    if (k == 0) throw InvalidInput("k must be at least 1");
    hits[k] = 0;
  }
  std::size_t counted = 0;
  for (const QueryResult& r : results) {
    const std::vector<std::string> pos = gt.positives(c, r.query_id);
    if (pos.empty() && filter == QueryFilter::WithPositives) continue;
    ++counted;
    // Rank (1-based) of the first positive in the list, or 0.
    std::size_t first = 0;
    for (std::size_t i = 0; i < r.matches.size() && first == 0; ++i) {
      if (std::find(pos.begin(), pos.end(), r.matches[i].map_id) != pos.end()) first = i + 1;
    }
    for (auto& [k, h] : hits) {
      if (first != 0 && first <= k) ++h;
    }
  }
  std::map<std::size_t, double> out;
  for (const auto& [k, h] : hits) {
    out[k] = counted == 0 ? 0.0 : static_cast<double>(h) / static_cast<double>(counted);
  }
  return out;
}

double average_precision(std::span<const double> distances, std::span<const int> labels) {
  if (distances.size() != labels.size()) throw InvalidInput("distances and labels differ in size");
  std::vector<std::size_t> order(distances.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (distances[a] != distances[b]) return distances[a] < distances[b];
    return labels[a] < labels[b];
  });
  std::size_t positives = 0;
  for (int l : labels) positives += l != 0 ? 1 : 0;
  if (positives == 0 || positives == labels.size()) {
    throw DegenerateInput("average precision needs at least one positive and one negative");
  }
  double sum = 0.0;
  std::size_t seen_pos = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 0) continue;
    ++seen_pos;
    sum += static_cast<double>(seen_pos) / static_cast<double>(rank + 1);
  }
  return sum / static_cast<double>(positives);
}

double average_precision(const ResultSet& results, const PositiveCriterion& c,
                         const GroundTruth& gt) {
  std::vector<double> distances;
  std::vector<int> labels;
  for (const QueryResult& r : results) {
    for (const auto& m : r.matches) {
      distances.push_back(m.distance);
      labels.push_back(gt.is_positive(c, r.query_id, m.map_id) ? 1 : 0);
    }
  }
  return average_precision(distances, labels);
}

std::vector<LocalizationTier> default_tiers() { return {{0.25, 2.0}, {0.5, 5.0}, {5.0, 10.0}}; }

std::vector<double> localized_fraction(const ResultSet& results, const GroundTruth& gt,
                                       std::span<const LocalizationTier> tiers) {
  std::vector<std::size_t> hits(tiers.size(), 0);
  for (const QueryResult& r : results) {
    const PlacePose& q = gt.query_pose(r.query_id);
    if (r.matches.empty()) continue;
    const PlacePose& m = gt.map_pose(r.matches.front().map_id);
    const double te = translation_error(q, m);
    const double re = rotation_error_deg(q, m);
    for (std::size_t t = 0; t < tiers.size(); ++t) {
      if (te <= tiers[t].max_translation_m && re <= tiers[t].max_rotation_deg) ++hits[t];
    }
  }
  std::vector<double> out(tiers.size(), 0.0);
  if (results.empty()) return out;
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    out[t] = static_cast<double>(hits[t]) / static_cast<double>(results.size());
  }
  return out;
}

std::vector<SweepPoint> threshold_sweep(const ResultSet& results, const GroundTruth& gt,
                                        SweepAxis axis, std::span<const double> grid,
                                        std::size_t k) {
  if (grid.empty()) throw InvalidInput("threshold grid is empty");
  std::vector<SweepPoint> curve;
  const std::size_t ks[] = {k};
  for (double t : grid) {
    PositiveCriterion c = axis == SweepAxis::Distance
                              ? PositiveCriterion(GeoThreshold{t, 180.0})
                              : PositiveCriterion(PsiThreshold{t});
    const auto recall = recall_at_k(results, c, gt, ks, QueryFilter::All);
    curve.push_back({t, recall.at(k)});
  }
  return curve;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("spearman needs equal sizes >= 2");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace gcl::eval
