#pragma once

#include <span>
#include <vector>

#include "gcl/graded_pairs.hpp"
#include "gcl/polygon.hpp"
#include "gcl/pose.hpp"

// Planar field-of-view sectors and their graded overlap.
namespace gcl::geom2d {

struct FovParams {
  double theta_deg = 90.0;  // aperture, (0, 360]
  double radius_m = 50.0;

  // Street-level defaults: r = 2 x 25 m, theta = 90 deg.
  static constexpr FovParams street() { return {90.0, 50.0}; }
  // Garden robot defaults used for 6DOF-annotated imagery.
  static constexpr FovParams garden() { return {90.0, 3.5}; }

  void validate() const;
};

enum class OverlapMode {
  IntersectionOverUnion,
  IntersectionOverArea,  // divided by the area of the first sector
};

// Mode that reproduces the published street-level calibration values
// (0.5563 for 0 m @ 40 deg and 0.4501 for 25 m @ 0 deg with theta = 90 deg).
// The acceptance suite re-derives it from the Monte-Carlo oracle.
inline constexpr OverlapMode kDefaultOverlapMode = OverlapMode::IntersectionOverArea;

// Arc segments per sector polygon.
inline constexpr int kArcSegments = 720;

struct FovSector {
  polygon::Vec2 center;
  double radius_m = 0.0;
  double heading_deg = 0.0;  // compass, [0, 360)
  double theta_deg = 0.0;

  // Analytic area (theta / 360) pi r^2.
  double area() const;
  // Exact point membership, boundary inclusive.
  bool contains(polygon::Vec2 p) const;
};

FovSector sector_from_pose(const CameraPose2D& pose, const FovParams& params);

// Polygonal approximation of one sector, split into convex pieces (one piece
// for apertures up to 180 deg, two above), in coordinates relative to the
// sector center.
class SectorShape {
 public:
  explicit SectorShape(const FovSector& sector, int arc_segments = kArcSegments);

  const FovSector& sector() const { return sector_; }
  std::span<const polygon::ConvexPolygon> pieces() const { return pieces_; }
  double polygon_area() const { return area_; }

 private:
  FovSector sector_;
  std::vector<polygon::ConvexPolygon> pieces_;
  double area_ = 0.0;
};

// Area of the intersection of the two polygonal sectors.
double intersection_area(const SectorShape& a, const SectorShape& b);

double shape_overlap(const SectorShape& a, const SectorShape& b, OverlapMode mode);

double sector_overlap(const FovSector& a, const FovSector& b,
                      OverlapMode mode = kDefaultOverlapMode);

// Weak annotator: GPS position plus compass heading.
double weak_2d_similarity(const CameraPose2D& a, const CameraPose2D& b,
                          const FovParams& params = FovParams::street(),
                          OverlapMode mode = kDefaultOverlapMode);

// Strong annotator: planar projection of full 6DOF poses.
double strong_2d_similarity(const Pose6DOF& a, const Pose6DOF& b,
                            const FovParams& params = FovParams::garden(),
                            OverlapMode mode = kDefaultOverlapMode);

// All query x map pairs; zero-overlap pairs are left implicit.
GradedPairSet pairwise_similarity_matrix(std::span<const CameraPose2D> queries,
                                         std::span<const CameraPose2D> maps,
                                         const FovParams& params = FovParams::street(),
                                         OverlapMode mode = kDefaultOverlapMode);

}  // namespace gcl::geom2d
