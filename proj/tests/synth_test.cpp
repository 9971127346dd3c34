#include "gcl/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "gcl/error.hpp"
#include "gcl/eval.hpp"
#include "gcl/geom2d.hpp"

using namespace gcl;

namespace {

synth::CityOptions small_options(std::uint64_t seed) {
  synth::CityOptions o;
  o.maps = 100;
  o.queries = 20;
  o.train_queries = 30;
  o.feature_dim = 24;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(MakeId, ZeroPadded) {
  EXPECT_EQ(synth::make_id("m", 42, 1000), "m042");
  EXPECT_EQ(synth::make_id("q", 0, 1), "q0");
  EXPECT_EQ(synth::make_id("t", 9, 11), "t09");
}

TEST(City2d, CountsShapesAndIds) {
  const auto s = synth::city2d(small_options(1));
  EXPECT_EQ(s.maps.size(), 100u);
  EXPECT_EQ(s.queries.size(), 20u);
  EXPECT_EQ(s.train_queries.size(), 30u);
  EXPECT_EQ(s.map_features.rows(), 100);
  EXPECT_EQ(s.map_features.cols(), 24);
  EXPECT_EQ(s.query_features.rows(), 20);
  EXPECT_EQ(s.train_features.rows(), 30);
  std::set<std::string> ids;
  for (const auto* v : {&s.maps, &s.queries, &s.train_queries}) {
    for (const auto& p : *v) EXPECT_TRUE(ids.insert(p.id).second) << p.id;
  }
  EXPECT_TRUE(s.map_features.allFinite());
}

TEST(City2d, DeterministicPerSeed) {
  const auto a = synth::city2d(small_options(3));
  const auto b = synth::city2d(small_options(3));
  const auto c = synth::city2d(small_options(4));
  EXPECT_EQ(a.map_features, b.map_features);
  EXPECT_EQ(a.queries[5].t0, b.queries[5].t0);
  EXPECT_NE(a.map_features, c.map_features);
}

TEST(City2d, MapHeadingsFollowStreets) {
  const auto s = synth::city2d(small_options(5));
  for (const auto& m : s.maps) {
    const double off = std::fmod(m.heading_deg + 360.0, 90.0);
    EXPECT_LE(std::min(off, 90.0 - off), 10.0 + 1e-9) << m.heading_deg;
  }
}

TEST(City2d, FeatureDistanceTracksViewOverlap) {
  const auto s = synth::city2d(small_options(6));
  std::vector<double> feature_dist, psi;
  for (std::size_t q = 0; q < s.train_queries.size(); ++q) {
    for (std::size_t m = 0; m < s.maps.size(); ++m) {
      feature_dist.push_back((s.train_features.row(static_cast<Eigen::Index>(q)) -
                              s.map_features.row(static_cast<Eigen::Index>(m)))
                                 .norm());
      psi.push_back(geom2d::weak_2d_similarity(s.train_queries[q], s.maps[m]));
    }
  }
  // More overlap, smaller feature distance.
  const double rho = eval::spearman(feature_dist, psi);
  EXPECT_LT(rho, -0.3) << rho;
}

TEST(City2d, RejectsBadOptions) {
  auto o = small_options(0);
  o.maps = 0;
  EXPECT_THROW(synth::city2d(o), InvalidInput);
  o = small_options(0);
  o.feature_dim = 0;
  EXPECT_THROW(synth::city2d(o), InvalidInput);
}

TEST(Cloud3d, PosesInsideRoomAndLevel) {
  const auto s = synth::cloud3d({10, 2000, 20, 20, 4, 2});
  EXPECT_EQ(s.cloud.points.size(), 2000u);
  ASSERT_EQ(s.poses.size(), 10u);
  for (const auto& p : s.poses) {
    EXPECT_GE(p.translation.x(), 2.0);
    EXPECT_LE(p.translation.x(), 18.0);
    EXPECT_DOUBLE_EQ(p.translation.z(), 1.5);
    // Optical axis stays horizontal.
    EXPECT_NEAR((p.rotation * Eigen::Vector3d::UnitZ()).z(), 0.0, 1e-12);
  }
  for (const auto& pt : s.cloud.points) {
    const bool on_face = std::abs(pt.x()) < 1e-9 || std::abs(pt.x() - 20) < 1e-9 || std::abs(pt.y()) < 1e-9 ||
                         std::abs(pt.y() - 20) < 1e-9 || std::abs(pt.z()) < 1e-9 || std::abs(pt.z() - 4) < 1e-9;
    EXPECT_TRUE(on_face);
  }
  EXPECT_NO_THROW(s.intrinsics.validate());
}

TEST(Cloud3d, RejectsTinyRoom) {
  EXPECT_THROW(synth::cloud3d({10, 100, 3, 20, 4, 0}), InvalidInput);
  EXPECT_THROW(synth::cloud3d({10, 100, 20, 20, 1, 0}), InvalidInput);
}

TEST(LevelCamera, CompassHeadings) {
  const auto north = synth::level_camera(0.0);
  EXPECT_TRUE((north * Eigen::Vector3d::UnitZ()).isApprox(Eigen::Vector3d::UnitY(), 1e-12));
  const auto east = synth::level_camera(90.0);
  EXPECT_TRUE((east * Eigen::Vector3d::UnitZ()).isApprox(Eigen::Vector3d::UnitX(), 1e-12));
  EXPECT_TRUE((east * Eigen::Vector3d::UnitY()).isApprox(-Eigen::Vector3d::UnitZ(), 1e-12));
}
