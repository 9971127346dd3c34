#include "gcl/io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "gcl/error.hpp"

using namespace gcl;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gcl_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  template <class F>
  std::size_t parse_error_line(F&& f) {
    try {
      f();
    } catch (const ParseError& e) {
      return e.line();
    }
    ADD_FAILURE() << "expected ParseError";
    return 0;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(IoTest, Poses2dRoundTripExactly) {
  const std::vector<CameraPose2D> poses{{"a", 0.1, -2.5e-7, 359.999}, {"b", 1e6 / 3.0, 4, 0}};
  const auto p = dir_ / "poses.csv";
  io::write_poses_2d(p, poses);
  const auto back = io::read_poses_2d(p);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].t0, poses[1].t0);
  EXPECT_EQ(back[0].t1, poses[0].t1);
  EXPECT_EQ(back[0].heading_deg, poses[0].heading_deg);
}

TEST_F(IoTest, PoseParseErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line([&] { io::read_poses_2d(write("a.csv", "id,t0,t1,heading_deg\nx,1,2,3\ny,1,oops,3\n")); }), 3u);
  EXPECT_EQ(parse_error_line([&] { io::read_poses_2d(write("b.csv", "id,t0,t1,heading_deg\nx,1,2\n")); }), 2u);
  EXPECT_EQ(parse_error_line([&] { io::read_poses_2d(write("c.csv", "id,x,y,heading_deg\n")); }), 1u);
  EXPECT_EQ(parse_error_line([&] {
              io::read_poses_6dof(write("d.csv", "id,x,y,z,qw,qx,qy,qz\nc,0,0,0,1,0,0,0.5\n"));
            }),
            2u);
}

TEST_F(IoTest, CrLfAndTrailingBlankLinesAccepted) {
  const auto poses = io::read_poses_2d(write("p.csv", "id,t0,t1,heading_deg\r\nx,1,2,3\r\n\r\n"));
  ASSERT_EQ(poses.size(), 1u);
  EXPECT_EQ(poses[0].heading_deg, 3.0);
}

TEST_F(IoTest, GradedPairsWriteSortedPositiveOnly) {
  GradedPairSet set({"q1", "q0"}, {"m1", "m0"});
  set.add("q1", "m0", 0.25);
  set.add("q0", "m1", 0.1234567);
  set.add("q0", "m0", 0.0);
  EXPECT_EQ(io::graded_pairs_csv(set), "query_id,map_id,psi\nq0,m1,0.123457\nq1,m0,0.250000\n");
  const auto p = dir_ / "pairs.csv";
  io::write_graded_pairs(p, set);
  const auto back = io::read_graded_pairs(p);
  EXPECT_NEAR(back.psi("q0", "m1"), 0.1234567, 5e-7);
  EXPECT_EQ(back.stored().size(), 2u);
}

TEST_F(IoTest, GradedPairsRejectOutOfRangeAndDuplicates) {
  EXPECT_EQ(parse_error_line([&] { io::read_graded_pairs(write("a.csv", "query_id,map_id,psi\nq,m,1.5\n")); }), 2u);
  EXPECT_EQ(parse_error_line([&] {
              io::read_graded_pairs(write("b.csv", "query_id,map_id,psi\nq,m,0.5\nq,m,0.5\n"));
            }),
            3u);
}

TEST_F(IoTest, PointCloudXyzAndPly) {
  const auto xyz = io::read_point_cloud(write("c.xyz", "0 0 1\n1.5\t2 3\n"));
  ASSERT_EQ(xyz.points.size(), 2u);
  EXPECT_EQ(xyz.points[1], Eigen::Vector3d(1.5, 2, 3));
  const auto ply = io::read_point_cloud(write(
      "c.ply",
      "ply\nformat ascii 1.0\nelement vertex 2\nproperty float z\nproperty float x\nproperty float y\n"
      "property uchar red\nend_header\n1 2 3 255\n4 5 6 0\n"));
  ASSERT_EQ(ply.points.size(), 2u);
  EXPECT_EQ(ply.points[0], Eigen::Vector3d(2, 3, 1));
  EXPECT_THROW(io::read_point_cloud(write("bin.ply", "ply\nformat binary_little_endian 1.0\nend_header\n")),
               ParseError);
  EXPECT_EQ(parse_error_line([&] { io::read_point_cloud(write("bad.xyz", "0 0 1\n0 1\n")); }), 2u);
}

TEST_F(IoTest, IntrinsicsStrictKeys) {
  const auto good = io::read_intrinsics(
      write("i.txt", "# camera\nfx=500\nfy=500\ncx=320\n\ncy=240\nwidth=640\nheight=480\n"));
  EXPECT_EQ(good.width, 640);
  EXPECT_EQ(parse_error_line([&] { io::read_intrinsics(write("u.txt", "fx=1\nfocal=2\n")); }), 2u);
  EXPECT_EQ(parse_error_line([&] { io::read_intrinsics(write("d.txt", "fx=1\nfx=2\n")); }), 2u);
  EXPECT_THROW(io::read_intrinsics(write("m.txt", "fx=1\nfy=1\ncx=0\ncy=0\nwidth=10\n")), InvalidInput);
}

TEST_F(IoTest, DescriptorStoreRoundTripAtFloatPrecision) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  io::DescriptorStore s{{"a", "b", "c"}, Eigen::MatrixXd(3, 5)};
  for (Eigen::Index i = 0; i < s.rows.size(); ++i) s.rows.data()[i] = g(rng);
  const auto p = dir_ / "d.gdsc";
  io::write_descriptors(p, s);
  EXPECT_TRUE(fs::exists(io::ids_sidecar(p)));
  const auto back = io::read_descriptors(p);
  EXPECT_EQ(back.ids, s.ids);
  EXPECT_EQ(back.rows, s.rows.cast<float>().cast<double>());
  EXPECT_EQ(fs::file_size(p), 4u + 4 + 8 + 15 * 4);
}

TEST_F(IoTest, DescriptorStoreCorruption) {
  io::DescriptorStore s{{"a"}, Eigen::MatrixXd::Ones(1, 2)};
  const auto p = dir_ / "d.gdsc";
  io::write_descriptors(p, s);
  const std::string bytes = io::read_file(p);
  io::write_file_atomic(p, bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(io::read_descriptors(p), ParseError);
  io::write_file_atomic(p, "XXXX" + bytes.substr(4));
  EXPECT_THROW(io::read_descriptors(p), ParseError);
  io::write_file_atomic(p, bytes);
  write("d.gdsc.ids", "a\nb\n");
  EXPECT_THROW(io::read_descriptors(p), InvalidInput);
}

TEST_F(IoTest, ModelRoundTripAtFloatPrecision) {
  const auto m = embed::EmbeddingModel::initialized(std::vector<std::size_t>{6, 4, 3}, false, 5);
  const auto p = dir_ / "m.gsim";
  io::save_model(p, m, "{\"note\":1}");
  EXPECT_EQ(io::read_file(dir_ / "m.gsim.json"), "{\"note\":1}");
  const auto back = io::load_model(p);
  EXPECT_FALSE(back.output_normalize());
  EXPECT_EQ(back.flatten(), m.flatten().cast<float>().cast<double>());
  EXPECT_EQ(io::model_bytes(back), io::read_file(p));
  io::write_file_atomic(p, io::read_file(p) + "x");
  EXPECT_THROW(io::load_model(p), ParseError);
}

TEST_F(IoTest, WhiteningRoundTrip) {
  retrieval::WhitenTransform t;
  t.mean = Eigen::VectorXd::LinSpaced(4, -1, 1);
  t.projection = Eigen::MatrixXd::Random(2, 4);
  t.eigenvalues = Eigen::Vector2d(3.0, 0.5);
  t.renormalize = false;
  const auto p = dir_ / "w.gpca";
  io::save_whitening(p, t);
  const auto back = io::load_whitening(p);
  EXPECT_FALSE(back.renormalize);
  EXPECT_EQ(back.projection, t.projection.cast<float>().cast<double>());
  EXPECT_EQ(back.mean, t.mean.cast<float>().cast<double>());
  EXPECT_EQ(back.eigenvalues, t.eigenvalues);
}

TEST_F(IoTest, ResultsRoundTripAndRankChecks) {
  const eval::ResultSet rs{{"q0", {{"m2", 0.125}, {"m0", 0.5}}}, {"q1", {{"m1", 1.0 / 3.0}}}};
  const auto p = dir_ / "r.csv";
  io::write_results(p, rs);
  const auto back = io::read_results(p);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].matches[1].map_id, "m0");
  EXPECT_EQ(back[1].matches[0].distance, 1.0 / 3.0);
  const std::string h = "query_id,rank,map_id,distance\n";
  EXPECT_EQ(parse_error_line([&] { io::read_results(write("a.csv", h + "q,1,m,0.1\nq,3,n,0.2\n")); }), 3u);
  EXPECT_EQ(parse_error_line([&] { io::read_results(write("b.csv", h + "q,1,m,0.3\nq,2,n,0.2\n")); }), 3u);
}

TEST_F(IoTest, LossTraceFormat) {
  const std::vector<train::BatchRecord> trace{{1, 64, 0.1, 0.25}, {2, 128, 0.1, 0.125}};
  const auto p = dir_ / "t.csv";
  io::write_loss_trace(p, trace);
  EXPECT_EQ(io::read_file(p), "batch,pairs_seen,lr,loss\n1,64,0.1,0.25\n2,128,0.1,0.125\n");
}

TEST_F(IoTest, AtomicWriteLeavesNoTemporaries) {
  const auto p = dir_ / "x.bin";
  io::write_file_atomic(p, "one");
  io::write_file_atomic(p, "two");
  EXPECT_EQ(io::read_file(p), "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++entries;
  EXPECT_EQ(entries, 1u);
}

TEST(FormatDouble, ShortestRoundTrip) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_fixed(0.5, 6), "0.500000");
}
