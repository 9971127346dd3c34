#include "gcl/geom2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gcl/error.hpp"

namespace gcl::geom2d {
namespace {

using polygon::Vec2;

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Intersections smaller than this fraction of a sector's area are snapped to
// zero; they come from sectors touching along an edge or at the apex.
constexpr double kNegligibleAreaFraction = 1e-12;

// Compass angle to unit vector: 0 deg = +y (north), 90 deg = +x (east).
Vec2 compass_direction(double deg) {
  const double rad = deg * kDegToRad;
  return {std::sin(rad), std::cos(rad)};
}

polygon::ConvexPolygon wedge_piece(double radius, double start_deg, double span_deg,
                                   int segments) {
  // Walk the arc with decreasing compass angle, i.e. counter-clockwise.
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(segments) + 2);
  vertices.push_back({0.0, 0.0});
  for (int i = 0; i <= segments; ++i) {
    const double deg = start_deg + span_deg - span_deg * i / segments;
    const Vec2 d = compass_direction(deg);
    vertices.push_back({radius * d.x, radius * d.y});
  }
  return polygon::ConvexPolygon(std::move(vertices));
}

}  // namespace

void FovParams::validate() const {
  if (!(theta_deg > 0.0 && theta_deg <= 360.0)) {
    throw InvalidInput("FoV aperture must be in (0, 360] degrees");
  }
  if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
    throw InvalidInput("FoV radius must be positive");
  }
}

double FovSector::area() const {
  return theta_deg / 360.0 * std::numbers::pi * radius_m * radius_m;
}

bool FovSector::contains(Vec2 p) const {
  const Vec2 u = p - center;
  const double dist2 = polygon::dot(u, u);
  if (dist2 > radius_m * radius_m) return false;
  if (dist2 == 0.0 || theta_deg >= 360.0) return true;
  const Vec2 h = compass_direction(heading_deg);
  return polygon::dot(u, h) >= std::sqrt(dist2) * std::cos(0.5 * theta_deg * kDegToRad);
}

FovSector sector_from_pose(const CameraPose2D& pose, const FovParams& params) {
  params.validate();
  validate(pose);
  return FovSector{{pose.t0, pose.t1}, params.radius_m, normalize_degrees(pose.heading_deg),
                   params.theta_deg};
}

SectorShape::SectorShape(const FovSector& sector, int arc_segments) : sector_(sector) {
  if (arc_segments < 2) throw InvalidInput("arc needs at least 2 segments");
  const double start = sector.heading_deg - 0.5 * sector.theta_deg;
  if (sector.theta_deg <= 180.0) {
    pieces_.push_back(wedge_piece(sector.radius_m, start, sector.theta_deg, arc_segments));
  } else {
    const double half = 0.5 * sector.theta_deg;
    const int half_segments = (arc_segments + 1) / 2;
    pieces_.push_back(wedge_piece(sector.radius_m, start, half, half_segments));
    pieces_.push_back(wedge_piece(sector.radius_m, start + half, half, half_segments));
  }
  for (const auto& p : pieces_) area_ += p.area();
}

double intersection_area(const SectorShape& a, const SectorShape& b) {
  const Vec2 offset = b.sector().center - a.sector().center;
  const double reach = a.sector().radius_m + b.sector().radius_m;
  if (polygon::dot(offset, offset) > reach * reach) return 0.0;
  double area = 0.0;
  for (const auto& pa : a.pieces()) {
    for (const auto& pb : b.pieces()) area += polygon::intersection_area(pa, pb, offset);
  }
  const double smaller = std::min(a.polygon_area(), b.polygon_area());
  return area < kNegligibleAreaFraction * smaller ? 0.0 : area;
}

double shape_overlap(const SectorShape& a, const SectorShape& b, OverlapMode mode) {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  double denom = a.polygon_area();
  if (mode == OverlapMode::IntersectionOverUnion) {
    denom = a.polygon_area() + b.polygon_area() - inter;
  }
  return std::clamp(inter / denom, 0.0, 1.0);
}

double sector_overlap(const FovSector& a, const FovSector& b, OverlapMode mode) {
  return shape_overlap(SectorShape(a), SectorShape(b), mode);
}

double weak_2d_similarity(const CameraPose2D& a, const CameraPose2D& b, const FovParams& params,
                          OverlapMode mode) {
  return sector_overlap(sector_from_pose(a, params), sector_from_pose(b, params), mode);
}

double strong_2d_similarity(const Pose6DOF& a, const Pose6DOF& b, const FovParams& params,
                            OverlapMode mode) {
  return weak_2d_similarity(to_planar(a), to_planar(b), params, mode);
}

GradedPairSet pairwise_similarity_matrix(std::span<const CameraPose2D> queries,
                                         std::span<const CameraPose2D> maps,
                                         const FovParams& params, OverlapMode mode) {
  if (queries.empty() || maps.empty()) throw InvalidInput("pose lists must be non-empty");
  params.validate();

  std::vector<std::string> qids;
  std::vector<std::string> mids;
  for (const auto& q : queries) qids.push_back(q.id);
  for (const auto& m : maps) mids.push_back(m.id);
  GradedPairSet out(std::move(qids), std::move(mids));

  std::vector<SectorShape> map_shapes;
  map_shapes.reserve(maps.size());
  for (const auto& m : maps) map_shapes.emplace_back(sector_from_pose(m, params));

  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const SectorShape qshape(sector_from_pose(queries[qi], params));
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
      const double psi = shape_overlap(qshape, map_shapes[mi], mode);
      if (psi > 0.0) {
        out.add(static_cast<std::uint32_t>(qi), static_cast<std::uint32_t>(mi), psi);
      }
    }
  }
  return out;
}

}  // namespace gcl::geom2d
