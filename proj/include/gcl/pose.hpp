#pragma once

#include <string>

#include <Eigen/Geometry>

namespace gcl {

// Planar camera annotation: UTM-style easting/northing plus a compass heading
// (0 = north, clockwise positive).
struct CameraPose2D {
  std::string id;
  double t0 = 0.0;  // east, meters
  double t1 = 0.0;  // north, meters
  double heading_deg = 0.0;
};

// Camera-to-world rigid pose. Rotation is a Hamilton unit quaternion stored
// (w, x, y, z); a camera-frame point p maps to rotation * p + translation.
struct Pose6DOF {
  std::string id;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
};

inline constexpr double kUnitQuaternionTolerance = 1e-6;

// Maps any finite angle into [0, 360).
double normalize_degrees(double deg);

// Smallest absolute difference between two compass angles, in [0, 180].
double heading_difference_deg(double a_deg, double b_deg);

// Geodesic angle between two rotations, 2 acos(|<q1, q2>|), in degrees.
double rotation_difference_deg(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

// Throws InvalidInput unless all fields are finite.
void validate(const CameraPose2D& pose);

// Throws InvalidInput unless the translation is finite and the quaternion
// norm is within kUnitQuaternionTolerance of 1.
void validate(const Pose6DOF& pose);

// Projects a 6DOF pose onto the ground plane: (x, y) of the translation and
// the compass heading of the body x-axis, taken from the ZYX yaw angle.
CameraPose2D to_planar(const Pose6DOF& pose);

}  // namespace gcl
