#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gcl/embed.hpp"
#include "gcl/eval.hpp"
#include "gcl/geom3d.hpp"
#include "gcl/graded_pairs.hpp"
#include "gcl/pose.hpp"
#include "gcl/retrieval.hpp"
#include "gcl/train.hpp"

// File formats. Text formats are strict: the header must match exactly and
// every row must have the expected field count. Parse failures throw
// ParseError with the offending line.
namespace gcl::io {

namespace fs = std::filesystem;

// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const fs::path& path, std::string_view bytes);
std::string read_file(const fs::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
// Fixed notation with `decimals` digits.
std::string format_fixed(double v, int decimals);

// id,t0,t1,heading_deg
std::vector<CameraPose2D> read_poses_2d(const fs::path& path);
void write_poses_2d(const fs::path& path, std::span<const CameraPose2D> poses);

// id,x,y,z,qw,qx,qy,qz
std::vector<Pose6DOF> read_poses_6dof(const fs::path& path);
void write_poses_6dof(const fs::path& path, std::span<const Pose6DOF> poses);

// query_id,map_id,psi. Only stored pairs with psi > 0 are written, psi with 6
// decimals, ordered by (query_id, map_id). On read the id universes are the
// ids seen in the file.
GradedPairSet read_graded_pairs(const fs::path& path);
void write_graded_pairs(const fs::path& path, const GradedPairSet& pairs);
std::string graded_pairs_csv(const GradedPairSet& pairs);

// .xyz (whitespace separated x y z per line) or ASCII .ply with x, y, z
// vertex properties; chosen by extension.
geom3d::PointCloud read_point_cloud(const fs::path& path);
void write_xyz(const fs::path& path, const geom3d::PointCloud& cloud);

// key=value lines with exactly the keys fx, fy, cx, cy, width, height.
// Blank lines and lines starting with '#' are ignored.
geom3d::CameraIntrinsics read_intrinsics(const fs::path& path);
void write_intrinsics(const fs::path& path, const geom3d::CameraIntrinsics& intr);

// "GDSC" store: magic, u32 dim, u64 count, count x dim little-endian f32.
// Row ids live in a sidecar text file `<path>.ids`, one per line.
struct DescriptorStore {
  std::vector<std::string> ids;
  Eigen::MatrixXd rows;  // count x dim
};
DescriptorStore read_descriptors(const fs::path& path);
void write_descriptors(const fs::path& path, const DescriptorStore& store);
fs::path ids_sidecar(const fs::path& path);

// "GSIM" checkpoint: magic, u16 version, u32 layer count, u8 normalize flag,
// u32 (in, out) per layer, then per layer the row-major weight and the bias
// as little-endian f32. `metadata_json` goes to the sidecar `<path>.json`.
void save_model(const fs::path& path, const embed::EmbeddingModel& model,
                std::string_view metadata_json);
embed::EmbeddingModel load_model(const fs::path& path);
std::string model_bytes(const embed::EmbeddingModel& model);

// "GPCA" container: magic, u16 version, u32 input dim, u32 output dim,
// u8 renormalize, then f32 mean, eigenvalues and row-major projection.
void save_whitening(const fs::path& path, const retrieval::WhitenTransform& t);
retrieval::WhitenTransform load_whitening(const fs::path& path);

// query_id,rank,map_id,distance with 1-based ranks.
eval::ResultSet read_results(const fs::path& path);
void write_results(const fs::path& path, const eval::ResultSet& results);

// batch,pairs_seen,lr,loss
void write_loss_trace(const fs::path& path, std::span<const train::BatchRecord> trace);

}  // namespace gcl::io
