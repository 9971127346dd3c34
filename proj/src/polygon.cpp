#include "gcl/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace gcl::polygon {
namespace {

// Unit directions closer than this are treated as parallel.
constexpr double kParallelEps = 1e-12;
// A point this far (meters) outside a half-plane still counts as inside.
constexpr double kSideEps = 1e-9;

bool outside(const HalfPlane& h, Vec2 r) { return cross(h.dir, r - h.point) < -kSideEps; }

Vec2 line_intersection(const HalfPlane& s, const HalfPlane& t) {
  const double alpha = cross(t.point - s.point, t.dir) / cross(s.dir, t.dir);
  return s.point + s.dir * alpha;
}

double canonical_angle(Vec2 dir) {
  double a = std::atan2(dir.y, dir.x);
  // atan2 returns both -pi and +pi for westward vectors; fold onto -pi.
  if (a >= std::numbers::pi) a -= 2.0 * std::numbers::pi;
  return a;
}

}  // namespace

double signed_area(std::span<const Vec2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(vertices[i], vertices[(i + 1) % n]);
  }
  return 0.5 * twice;
}

ConvexPolygon::ConvexPolygon(std::vector<Vec2> ccw_vertices) : vertices_(std::move(ccw_vertices)) {
  const std::size_t n = vertices_.size();
  edges_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 d = vertices_[(i + 1) % n] - a;
    const double len = std::hypot(d.x, d.y);
    if (len == 0.0) continue;
    const Vec2 unit{d.x / len, d.y / len};
    edges_.push_back({a, unit, canonical_angle(unit)});
  }
  std::stable_sort(edges_.begin(), edges_.end(),
                   [](const HalfPlane& l, const HalfPlane& r) { return l.angle < r.angle; });
  area_ = signed_area(vertices_);
}

std::vector<Vec2> intersect_half_planes(std::span<const HalfPlane> sorted) {
  std::deque<HalfPlane> dq;
  for (const HalfPlane& h : sorted) {
    while (dq.size() > 1 && outside(h, line_intersection(dq[dq.size() - 1], dq[dq.size() - 2]))) {
      dq.pop_back();
    }
    while (dq.size() > 1 && outside(h, line_intersection(dq[0], dq[1]))) {
      dq.pop_front();
    }
    if (!dq.empty() && std::abs(cross(h.dir, dq.back().dir)) < kParallelEps) {
      // Opposite parallel lines leave at most a sliver of zero width.
      if (dot(h.dir, dq.back().dir) < 0.0) return {};
      if (outside(h, dq.back().point)) {
        dq.pop_back();
      } else {
        continue;
      }
    }
    dq.push_back(h);
  }
  while (dq.size() > 2 && outside(dq[0], line_intersection(dq[dq.size() - 1], dq[dq.size() - 2]))) {
    dq.pop_back();
  }
  while (dq.size() > 2 && outside(dq[dq.size() - 1], line_intersection(dq[0], dq[1]))) {
    dq.pop_front();
  }
  if (dq.size() < 3) return {};

  std::vector<Vec2> out;
  out.reserve(dq.size());
  for (std::size_t i = 0; i < dq.size(); ++i) {
    const HalfPlane& next = dq[(i + 1) % dq.size()];
    if (std::abs(cross(dq[i].dir, next.dir)) < kParallelEps) return {};
    out.push_back(line_intersection(dq[i], next));
  }
  return out;
}

double intersection_area(const ConvexPolygon& a, const ConvexPolygon& b, Vec2 offset_b) {
  const auto ea = a.edges();
  const auto eb = b.edges();
  std::vector<HalfPlane> merged;
  merged.reserve(ea.size() + eb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && ea[i].angle <= eb[j].angle)) {
      merged.push_back(ea[i++]);
    } else {
      HalfPlane h = eb[j++];
      h.point = h.point + offset_b;
      merged.push_back(h);
    }
  }
  const std::vector<Vec2> region = intersect_half_planes(merged);
  return std::max(0.0, signed_area(region));
}

}  // namespace gcl::polygon
