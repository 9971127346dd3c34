#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gcl/geom3d.hpp"
#include "gcl/pose.hpp"

// Seeded synthetic scenarios for pipeline runs and tests.
namespace gcl::synth {

// Street-like layout: map cameras on a jittered grid looking along one of the
// four street directions, plus query and training cameras dropped at random
// positions near the streets. Features are a smooth random function of where
// the camera looks (a point ahead of it along its heading, and the heading
// itself) mixed with noise and nuisance dimensions, so that cameras with
// overlapping views have nearby features.
struct CityOptions {
  std::size_t maps = 1000;
  std::size_t queries = 200;
  std::size_t train_queries = 200;
  std::size_t feature_dim = 32;
  double grid_spacing_m = 12.0;
  double position_jitter_m = 2.0;
  double heading_jitter_deg = 10.0;
  double look_ahead_m = 25.0;
  double length_scale_m = 60.0;
  double heading_scale_deg = 60.0;
  double noise = 0.15;
  std::uint64_t seed = 0;
  void validate() const;
};

struct CityScenario {
  std::vector<CameraPose2D> maps;
  std::vector<CameraPose2D> queries;
  std::vector<CameraPose2D> train_queries;
  Eigen::MatrixXd map_features;    // maps x feature_dim
  Eigen::MatrixXd query_features;  // queries x feature_dim
  Eigen::MatrixXd train_features;  // train_queries x feature_dim
};

CityScenario city2d(const CityOptions& options);

// Points scattered over the walls, floor and ceiling of a box room, with
// cameras inside looking horizontally.
struct CloudOptions {
  std::size_t poses = 20;
  std::size_t points = 20000;
  double room_x_m = 20.0;
  double room_y_m = 20.0;
  double room_z_m = 4.0;
  std::uint64_t seed = 0;
  void validate() const;
};

struct CloudScenario {
  geom3d::PointCloud cloud;
  std::vector<Pose6DOF> poses;
  geom3d::CameraIntrinsics intrinsics;
};

CloudScenario cloud3d(const CloudOptions& options);

// Camera-to-world rotation for a level camera (x right, y down, z forward)
// facing the given compass heading, with world z up.
Eigen::Quaterniond level_camera(double heading_deg);

// Ids "<prefix>00042", zero padded to the width of count - 1.
std::string make_id(std::string_view prefix, std::size_t index, std::size_t count);

}  // namespace gcl::synth
