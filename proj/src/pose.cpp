#include "gcl/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gcl/error.hpp"

namespace gcl {

double normalize_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of a tiny negative value can round up to exactly 360.
  if (r >= 360.0) r = 0.0;
  return r;
}

double heading_difference_deg(double a_deg, double b_deg) {
  const double d = normalize_degrees(a_deg - b_deg);
  return d > 180.0 ? 360.0 - d : d;
}

double rotation_difference_deg(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  const double dot = std::abs(a.normalized().coeffs().dot(b.normalized().coeffs()));
  return 2.0 * std::acos(std::min(1.0, dot)) * 180.0 / std::numbers::pi;
}

void validate(const CameraPose2D& pose) {
  if (!std::isfinite(pose.t0) || !std::isfinite(pose.t1) || !std::isfinite(pose.heading_deg)) {
    throw InvalidInput("pose '" + pose.id + "' has non-finite fields");
  }
}

void validate(const Pose6DOF& pose) {
  if (!pose.translation.allFinite() || !pose.rotation.coeffs().allFinite()) {
    throw InvalidInput("pose '" + pose.id + "' has non-finite fields");
  }
  if (std::abs(pose.rotation.norm() - 1.0) > kUnitQuaternionTolerance) {
    throw InvalidInput("pose '" + pose.id + "' rotation is not a unit quaternion");
  }
}

CameraPose2D to_planar(const Pose6DOF& pose) {
  validate(pose);
  const Eigen::Quaterniond& q = pose.rotation;
  const double yaw = std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                                1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
  // Math angle (from +x, counter-clockwise) to compass angle (from +y, clockwise).
  const double heading = normalize_degrees(90.0 - yaw * 180.0 / std::numbers::pi);
  return CameraPose2D{pose.id, pose.translation.x(), pose.translation.y(), heading};
}

}  // namespace gcl
