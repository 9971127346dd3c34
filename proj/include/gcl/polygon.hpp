#pragma once

#include <span>
#include <vector>

namespace gcl::polygon {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Closed half-plane to the left of the directed line through `point` along
// the unit vector `dir`. `angle` is atan2 of `dir` in [-pi, pi).
struct HalfPlane {
  Vec2 point;
  Vec2 dir;
  double angle = 0.0;
};

// Shoelace area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Vec2> vertices);

// A convex polygon in counter-clockwise order together with its edge
// half-planes sorted by angle, ready for repeated intersection.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  explicit ConvexPolygon(std::vector<Vec2> ccw_vertices);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const HalfPlane> edges() const { return edges_; }
  double area() const { return area_; }

 private:
  std::vector<Vec2> vertices_;
  std::vector<HalfPlane> edges_;
  double area_ = 0.0;
};

// Intersection of a set of half-planes sorted by angle. The set must describe
// a bounded region (it always contains the edges of at least one polygon here).
// Returns the counter-clockwise vertices, or an empty vector when the region
// has no interior.
std::vector<Vec2> intersect_half_planes(std::span<const HalfPlane> sorted);

// Area of a ∩ (b translated by offset). Linear in the vertex counts since both
// edge lists are already angle sorted.
double intersection_area(const ConvexPolygon& a, const ConvexPolygon& b, Vec2 offset_b);

}  // namespace gcl::polygon
