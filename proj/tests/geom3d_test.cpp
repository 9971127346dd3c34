#include "gcl/geom3d.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "gcl/error.hpp"
#include "gcl/synth.hpp"
#include "oracles/oracles.hpp"

using namespace gcl;
using geom3d::CameraIntrinsics;
using geom3d::PointCloud;

namespace {

const CameraIntrinsics kIntr{100.0, 100.0, 50.0, 40.0, 100, 80};

Pose6DOF identity(std::string id = "c") { return {std::move(id), {0, 0, 0}, Eigen::Quaterniond::Identity()}; }

Eigen::Quaterniond random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

}  // namespace

TEST(Intrinsics, Validation) {
  EXPECT_NO_THROW(kIntr.validate());
  EXPECT_THROW((CameraIntrinsics{0, 1, 0, 0, 10, 10}.validate()), InvalidInput);
  EXPECT_THROW((CameraIntrinsics{1, 1, 0, 0, 0, 10}.validate()), InvalidInput);
}

TEST(VisiblePoints, PointAheadIsSeen) {
  const PointCloud cloud{{{0, 0, 1}}};
  EXPECT_EQ(geom3d::visible_points(cloud, identity(), kIntr).indices, std::vector<std::uint32_t>{0});
}

TEST(VisiblePoints, PointBehindIsCulled) {
  const PointCloud cloud{{{0, 0, -1}}};
  EXPECT_TRUE(geom3d::visible_points(cloud, identity(), kIntr).indices.empty());
  // Depth zero is not in front.
  const PointCloud on_plane{{{0, 0, 0}}};
  EXPECT_TRUE(geom3d::visible_points(on_plane, identity(), kIntr).indices.empty());
}

TEST(VisiblePoints, HalfOpenImageBounds) {
  // u = 100 x / z + 50: x = -0.5 lands on u = 0 (in), x = 0.5 on u = 100 (out).
  const PointCloud cloud{{{-0.5, 0, 1}, {0.5, 0, 1}, {0, -0.4, 1}, {0, 0.4, 1}}};
  EXPECT_EQ(geom3d::visible_points(cloud, identity(), kIntr).indices,
            (std::vector<std::uint32_t>{0, 2}));
}

TEST(VisiblePoints, EmptyCloudRejected) {
  EXPECT_THROW(geom3d::visible_points(PointCloud{}, identity(), kIntr), InvalidInput);
}

TEST(VisiblePoints, MatchesScalarProjection) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  PointCloud cloud;
  for (int i = 0; i < 1000; ++i) cloud.points.emplace_back(u(rng), u(rng), u(rng));
  for (int t = 0; t < 20; ++t) {
    const Pose6DOF pose{"p", {u(rng) * 0.2, u(rng) * 0.2, u(rng) * 0.2}, random_rotation(rng)};
    EXPECT_EQ(geom3d::visible_points(cloud, pose, kIntr).indices,
              oracle::visible_indices(cloud.points, pose, kIntr));
  }
}

TEST(SetIou, Arithmetic) {
  EXPECT_DOUBLE_EQ(geom3d::set_iou({{0, 1, 2}}, {{1, 2, 3}}), 0.5);
  EXPECT_DOUBLE_EQ(geom3d::set_iou({}, {}), 0.0);
  EXPECT_DOUBLE_EQ(geom3d::set_iou({{4}}, {}), 0.0);
}

TEST(Fov3d, SamePoseIsOne) {
  const PointCloud cloud{{{0, 0, 2}, {0.1, 0.1, 3}}};
  EXPECT_DOUBLE_EQ(geom3d::fov3d_similarity(cloud, identity(), identity(), kIntr), 1.0);
}

TEST(Fov3d, OppositeCamerasOverOneSidedCloud) {
  const PointCloud cloud{{{0, 0, 2}, {0.1, 0.1, 3}}};
  Pose6DOF back{"b", {0, 0, 0}, Eigen::Quaterniond(Eigen::AngleAxisd(std::numbers::pi, Eigen::Vector3d::UnitY()))};
  EXPECT_DOUBLE_EQ(geom3d::fov3d_similarity(cloud, identity(), back, kIntr), 0.0);
}

TEST(Fov3d, FourPointConstruction) {
  // A camera at the origin and one shifted right by 1 m, both looking down +z.
  // At depth 2 they see x in [-1, 1) and [0, 2).
  const PointCloud cloud{{{-0.8, 0, 2}, {0.2, 0, 2}, {0.7, 0, 2}, {1.5, 0, 2}}};
  const Pose6DOF b{"b", {1, 0, 0}, Eigen::Quaterniond::Identity()};
  ASSERT_EQ(oracle::visible_indices(cloud.points, identity(), kIntr), (std::vector<std::uint32_t>{0, 1, 2}));
  ASSERT_EQ(oracle::visible_indices(cloud.points, b, kIntr), (std::vector<std::uint32_t>{1, 2, 3}));
  EXPECT_DOUBLE_EQ(geom3d::fov3d_similarity(cloud, identity(), b, kIntr), 0.5);
}

TEST(Fov3d, EmptyViewAgainstItselfIsZero) {
  const PointCloud cloud{{{0, 0, -2}}};
  EXPECT_DOUBLE_EQ(geom3d::fov3d_similarity(cloud, identity(), identity(), kIntr), 0.0);
}

TEST(Fov3d, RigidInvariance) {
  const auto s = synth::cloud3d({6, 3000, 20, 20, 4, 5});
  std::mt19937_64 rng(3);
  const Eigen::Quaterniond rot = random_rotation(rng);
  const Eigen::Vector3d shift(10, -4, 2.5);
  PointCloud moved;
  for (const auto& p : s.cloud.points) moved.points.push_back(rot * p + shift);
  for (std::size_t i = 0; i < s.poses.size(); ++i) {
    for (std::size_t j = 0; j < s.poses.size(); ++j) {
      Pose6DOF a = s.poses[i], b = s.poses[j];
      a.translation = rot * a.translation + shift;
      a.rotation = rot * a.rotation;
      b.translation = rot * b.translation + shift;
      b.rotation = rot * b.rotation;
      // Rounding can move a point across the image border, so compare the
      // sets the oracle sees after the transform.
      if (oracle::visible_indices(moved.points, a, s.intrinsics) !=
              oracle::visible_indices(s.cloud.points, s.poses[i], s.intrinsics) ||
          oracle::visible_indices(moved.points, b, s.intrinsics) !=
              oracle::visible_indices(s.cloud.points, s.poses[j], s.intrinsics)) {
        continue;
      }
      EXPECT_DOUBLE_EQ(geom3d::fov3d_similarity(moved, a, b, s.intrinsics),
                       geom3d::fov3d_similarity(s.cloud, s.poses[i], s.poses[j], s.intrinsics));
    }
  }
}

TEST(Fov3dMatrix, MatchesPairwiseCalls) {
  const auto s = synth::cloud3d({8, 4000, 20, 20, 4, 9});
  const auto set = geom3d::fov3d_matrix(s.cloud, s.poses, s.poses, s.intrinsics);
  EXPECT_EQ(set.logical_size(), 64u);
  for (const auto& a : s.poses) {
    for (const auto& b : s.poses) {
      EXPECT_EQ(set.psi(a.id, b.id), geom3d::fov3d_similarity(s.cloud, a, b, s.intrinsics));
      EXPECT_EQ(set.psi(a.id, b.id), set.psi(b.id, a.id));
    }
  }
}

TEST(Fov3dMatrix, SmallCardinalities) {
  const PointCloud cloud{{{0, 0, 2}}};
  const std::vector<Pose6DOF> one{identity("a")};
  const auto set = geom3d::fov3d_matrix(cloud, one, one, kIntr);
  ASSERT_EQ(set.stored().size(), 1u);
  EXPECT_EQ(set.psi(std::string("a"), std::string("a")), 1.0);
  const std::vector<Pose6DOF> two{identity("a"), identity("b")};
  EXPECT_EQ(geom3d::fov3d_matrix(cloud, two, two, kIntr).logical_size(), 4u);
}
