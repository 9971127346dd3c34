#include "gcl/geom3d.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <iterator>

#include "gcl/error.hpp"

namespace gcl::geom3d {
namespace {

void validate_cloud(const PointCloud& cloud) {
  if (cloud.points.empty()) throw InvalidInput("point cloud is empty");
}

void warn_empty(const Pose6DOF& pose) {
  std::cerr << "warning: pose '" << pose.id << "' sees no points; its similarity is 0\n";
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw InvalidInput("focal lengths must be positive");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw InvalidInput("principal point must be finite");
  if (width <= 0 || height <= 0) throw InvalidInput("image size must be positive");
}

VisibleSet visible_points(const PointCloud& cloud, const Pose6DOF& pose,
                          const CameraIntrinsics& intr) {
  validate_cloud(cloud);
  validate(pose);
  intr.validate();

  // world -> camera is the inverse of the stored camera -> world transform.
  const Eigen::Matrix3d world_to_cam = pose.rotation.normalized().toRotationMatrix().transpose();
  const Eigen::Vector3d origin = pose.translation;
  VisibleSet out;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Eigen::Vector3d pc = world_to_cam * (cloud.points[i] - origin);
    if (!(pc.z() > 0.0)) continue;
    const double u = intr.fx * pc.x() / pc.z() + intr.cx;
    const double v = intr.fy * pc.y() / pc.z() + intr.cy;
    if (u >= 0.0 && u < intr.width && v >= 0.0 && v < intr.height) {
      out.indices.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

double set_iou(const VisibleSet& a, const VisibleSet& b) {
  std::size_t common = 0;
  auto ia = a.indices.begin();
  auto ib = b.indices.begin();
  while (ia != a.indices.end() && ib != b.indices.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.indices.size() + b.indices.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

double fov3d_similarity(const PointCloud& cloud, const Pose6DOF& a, const Pose6DOF& b,
                        const CameraIntrinsics& intr) {
  const VisibleSet va = visible_points(cloud, a, intr);
  const VisibleSet vb = visible_points(cloud, b, intr);
  if (va.indices.empty()) warn_empty(a);
  if (vb.indices.empty() && a.id != b.id) warn_empty(b);
  return set_iou(va, vb);
}

GradedPairSet fov3d_matrix(const PointCloud& cloud, std::span<const Pose6DOF> queries,
                           std::span<const Pose6DOF> maps, const CameraIntrinsics& intr) {
  if (queries.empty() || maps.empty()) throw InvalidInput("pose lists must be non-empty");
  std::vector<std::string> qids;
  std::vector<std::string> mids;
  for (const auto& q : queries) qids.push_back(q.id);
  for (const auto& m : maps) mids.push_back(m.id);
  GradedPairSet out(std::move(qids), std::move(mids));

  auto project_all = [&](std::span<const Pose6DOF> poses) {
    std::vector<VisibleSet> sets;
    sets.reserve(poses.size());
    for (const auto& p : poses) {
      sets.push_back(visible_points(cloud, p, intr));
      if (sets.back().indices.empty()) warn_empty(p);
    }
    return sets;
  };
  const std::vector<VisibleSet> qsets = project_all(queries);
  const std::vector<VisibleSet> msets = project_all(maps);

  for (std::size_t qi = 0; qi < qsets.size(); ++qi) {
    for (std::size_t mi = 0; mi < msets.size(); ++mi) {
      const double psi = set_iou(qsets[qi], msets[mi]);
      if (psi > 0.0) {
        out.add(static_cast<std::uint32_t>(qi), static_cast<std::uint32_t>(mi), psi);
      }
    }
  }
  return out;
}

}  // namespace gcl::geom3d
