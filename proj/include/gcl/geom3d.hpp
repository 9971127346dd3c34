#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gcl/graded_pairs.hpp"
#include "gcl/pose.hpp"

// 3D field-of-view overlap: IoU of the point-cloud subsets each camera sees.
namespace gcl::geom3d {

// Pinhole intrinsics in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
};

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
};

// Sorted, deduplicated indices into a PointCloud.
struct VisibleSet {
  std::vector<std::uint32_t> indices;
};

// Point i is visible iff its camera-frame depth is strictly positive and its
// projection lands in [0, width) x [0, height). No occlusion test.
VisibleSet visible_points(const PointCloud& cloud, const Pose6DOF& pose,
                          const CameraIntrinsics& intr);

// |a ∩ b| / |a ∪ b|, and 0 for an empty union.
double set_iou(const VisibleSet& a, const VisibleSet& b);

double fov3d_similarity(const PointCloud& cloud, const Pose6DOF& a, const Pose6DOF& b,
                        const CameraIntrinsics& intr);

// All query x map pairs; each pose is projected once.
GradedPairSet fov3d_matrix(const PointCloud& cloud, std::span<const Pose6DOF> queries,
                           std::span<const Pose6DOF> maps, const CameraIntrinsics& intr);

}  // namespace gcl::geom3d
