#include "gcl/io.hpp"

#include <unistd.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "gcl/error.hpp"

namespace gcl::io {
namespace {

// ---------------------------------------------------------------------------
// Text helpers

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Lines without terminators; a trailing '\r' is dropped. Trailing empty lines
// are removed so that a final newline is not an extra row.
std::vector<std::string> read_lines(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

class LineParser {
 public:
  LineParser(const fs::path& path, std::size_t line) : path_(path.string()), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, line_, what); }

  double real(std::string_view field, const char* name) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      fail(std::string("bad number for ") + name + ": '" + std::string(field) + "'");
    }
    if (!std::isfinite(v)) fail(std::string("non-finite ") + name);
    return v;
  }

  long long integer(std::string_view field, const char* name) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      fail(std::string("bad integer for ") + name + ": '" + std::string(field) + "'");
    }
    return v;
  }

  std::string id(std::string_view field) const {
    if (field.empty()) fail("empty id");
    return std::string(field);
  }

 private:
  std::string path_;
  std::size_t line_;
};

// Checks the header and returns the data rows split on commas, each with its
// 1-based line number.
std::vector<std::pair<std::size_t, std::vector<std::string_view>>> csv_rows(
    const fs::path& path, const std::vector<std::string>& lines, std::string_view header) {
  if (lines.empty()) throw ParseError(path.string(), 1, "missing header '" + std::string(header) + "'");
  if (lines[0] != header) {
    throw ParseError(path.string(), 1,
                     "expected header '" + std::string(header) + "', got '" + lines[0] + "'");
  }
  const std::size_t fields = split(header, ',').size();
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cols = split(lines[i], ',');
    if (cols.size() != fields) {
      throw ParseError(path.string(), i + 1,
                       "expected " + std::to_string(fields) + " fields, got " +
                           std::to_string(cols.size()));
    }
    rows.emplace_back(i + 1, std::move(cols));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Binary helpers (little-endian regardless of host)

class ByteWriter {
 public:
  void magic(std::string_view m) { out_.append(m); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  std::string& bytes() { return out_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string bytes, std::string path) : in_(std::move(bytes)), path_(std::move(path)) {}

  void magic(std::string_view m) {
    need(m.size());
    if (std::string_view(in_).substr(pos_, m.size()) != m) {
      throw ParseError(path_, 0, "bad magic, expected '" + std::string(m) + "'");
    }
    pos_ += m.size();
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
  void expect_end() const {
    if (pos_ != in_.size()) throw ParseError(path_, 0, "trailing bytes after payload");
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw ParseError(path_, 0, "file truncated");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string in_;
  std::string path_;
  std::size_t pos_ = 0;
};

constexpr std::uint16_t kModelVersion = 1;
constexpr std::uint16_t kWhitenVersion = 1;

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw RuntimeFailure("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw RuntimeFailure("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Poses

std::vector<CameraPose2D> read_poses_2d(const fs::path& path) {
  std::vector<CameraPose2D> out;
  const auto lines = read_lines(path);
  for (const auto& [line, f] : csv_rows(path, lines, "id,t0,t1,heading_deg")) {
    LineParser p(path, line);
    out.push_back({p.id(f[0]), p.real(f[1], "t0"), p.real(f[2], "t1"), p.real(f[3], "heading_deg")});
  }
  return out;
}

void write_poses_2d(const fs::path& path, std::span<const CameraPose2D> poses) {
  std::string s = "id,t0,t1,heading_deg\n";
  for (const auto& p : poses) {
    s += p.id + ',' + format_double(p.t0) + ',' + format_double(p.t1) + ',' +
         format_double(p.heading_deg) + '\n';
  }
  write_file_atomic(path, s);
}

std::vector<Pose6DOF> read_poses_6dof(const fs::path& path) {
  std::vector<Pose6DOF> out;
  const auto lines = read_lines(path);
  for (const auto& [line, f] : csv_rows(path, lines, "id,x,y,z,qw,qx,qy,qz")) {
    LineParser p(path, line);
    Pose6DOF pose;
    pose.id = p.id(f[0]);
    pose.translation = {p.real(f[1], "x"), p.real(f[2], "y"), p.real(f[3], "z")};
    pose.rotation = Eigen::Quaterniond(p.real(f[4], "qw"), p.real(f[5], "qx"), p.real(f[6], "qy"),
                                       p.real(f[7], "qz"));
    if (std::abs(pose.rotation.norm() - 1.0) > kUnitQuaternionTolerance) {
      p.fail("quaternion is not unit length");
    }
    out.push_back(std::move(pose));
  }
  return out;
}

void write_poses_6dof(const fs::path& path, std::span<const Pose6DOF> poses) {
  std::string s = "id,x,y,z,qw,qx,qy,qz\n";
  for (const auto& p : poses) {
    const auto& t = p.translation;
    const auto& q = p.rotation;
    s += p.id + ',' + format_double(t.x()) + ',' + format_double(t.y()) + ',' +
         format_double(t.z()) + ',' + format_double(q.w()) + ',' + format_double(q.x()) + ',' +
         format_double(q.y()) + ',' + format_double(q.z()) + '\n';
  }
  write_file_atomic(path, s);
}

// ---------------------------------------------------------------------------
// Graded pairs

GradedPairSet read_graded_pairs(const fs::path& path) {
  std::vector<GradedPair> records;
  std::unordered_set<std::string> seen;
  const auto lines = read_lines(path);
  for (const auto& [line, f] : csv_rows(path, lines, "query_id,map_id,psi")) {
    LineParser p(path, line);
    const double psi = p.real(f[2], "psi");
    if (psi < 0.0 || psi > 1.0) p.fail("psi outside [0, 1]");
    records.push_back({p.id(f[0]), p.id(f[1]), psi});
    if (!seen.insert(records.back().query_id + '\n' + records.back().map_id).second) {
      p.fail("duplicate pair (" + records.back().query_id + ", " + records.back().map_id + ")");
    }
  }
  try {
    return GradedPairSet::from_records(records);
  } catch (const InvalidInput& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

std::string graded_pairs_csv(const GradedPairSet& pairs) {
  std::string s = "query_id,map_id,psi\n";
  for (const GradedPair& r : pairs.sorted_records()) {
    if (r.psi <= 0.0) continue;
    s += r.query_id + ',' + r.map_id + ',' + format_fixed(r.psi, 6) + '\n';
  }
  return s;
}

void write_graded_pairs(const fs::path& path, const GradedPairSet& pairs) {
  write_file_atomic(path, graded_pairs_csv(pairs));
}

// ---------------------------------------------------------------------------
// Point clouds

namespace {

geom3d::PointCloud read_xyz(const fs::path& path) {
  geom3d::PointCloud cloud;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto f = split_ws(lines[i]);
    if (f.empty()) continue;
    LineParser p(path, i + 1);
    if (f.size() != 3) p.fail("expected 3 coordinates, got " + std::to_string(f.size()));
    cloud.points.emplace_back(p.real(f[0], "x"), p.real(f[1], "y"), p.real(f[2], "z"));
  }
  return cloud;
}

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> properties;  // list properties contribute a name too
};

geom3d::PointCloud read_ply(const fs::path& path) {
  const auto lines = read_lines(path);
  const std::string where = path.string();
  if (lines.empty() || lines[0] != "ply") throw ParseError(where, 1, "missing 'ply' magic");
  std::vector<PlyElement> elements;
  std::size_t i = 1;
  bool ascii = false;
  for (; i < lines.size(); ++i) {
    const auto f = split_ws(lines[i]);
    if (f.empty()) continue;
    if (f[0] == "end_header") {
      ++i;
      break;
    }
    if (f[0] == "format") {
      if (f.size() < 2 || f[1] != "ascii") throw ParseError(where, i + 1, "only ASCII PLY is supported");
      ascii = true;
    } else if (f[0] == "element") {
      if (f.size() != 3) throw ParseError(where, i + 1, "malformed element line");
      LineParser p(path, i + 1);
      const long long n = p.integer(f[2], "element count");
      if (n < 0) p.fail("negative element count");
      elements.push_back({std::string(f[1]), static_cast<std::size_t>(n), {}});
    } else if (f[0] == "property") {
      if (elements.empty() || f.size() < 3) throw ParseError(where, i + 1, "property outside element");
      elements.back().properties.emplace_back(f.back());
    } else if (f[0] != "comment" && f[0] != "obj_info") {
      throw ParseError(where, i + 1, "unexpected header line '" + lines[i] + "'");
    }
  }
  if (!ascii) throw ParseError(where, 0, "missing format line");

  geom3d::PointCloud cloud;
  bool found = false;
  for (const PlyElement& e : elements) {
    if (e.name != "vertex") {
      i += e.count;
      continue;
    }
    found = true;
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t k = 0; k < e.properties.size(); ++k) {
      if (e.properties[k] == "x") ix = static_cast<int>(k);
      if (e.properties[k] == "y") iy = static_cast<int>(k);
      if (e.properties[k] == "z") iz = static_cast<int>(k);
    }
    if (ix < 0 || iy < 0 || iz < 0) throw ParseError(where, 0, "vertex element lacks x, y, z");
    for (std::size_t v = 0; v < e.count; ++v, ++i) {
      if (i >= lines.size()) throw ParseError(where, i + 1, "file ends inside vertex data");
      const auto f = split_ws(lines[i]);
      LineParser p(path, i + 1);
      if (f.size() < e.properties.size()) p.fail("too few vertex fields");
      cloud.points.emplace_back(p.real(f[static_cast<std::size_t>(ix)], "x"),
                                p.real(f[static_cast<std::size_t>(iy)], "y"),
                                p.real(f[static_cast<std::size_t>(iz)], "z"));
    }
  }
  if (!found) throw ParseError(where, 0, "no vertex element");
  return cloud;
}

}  // namespace

geom3d::PointCloud read_point_cloud(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".xyz") return read_xyz(path);
  if (ext == ".ply") return read_ply(path);
  throw InvalidInput("unsupported point cloud extension '" + ext + "' (use .xyz or .ply)");
}

void write_xyz(const fs::path& path, const geom3d::PointCloud& cloud) {
  std::string s;
  for (const auto& p : cloud.points) {
    s += format_double(p.x()) + ' ' + format_double(p.y()) + ' ' + format_double(p.z()) + '\n';
  }
  write_file_atomic(path, s);
}

// ---------------------------------------------------------------------------
// Intrinsics

geom3d::CameraIntrinsics read_intrinsics(const fs::path& path) {
  const auto lines = read_lines(path);
  std::map<std::string, std::pair<std::size_t, std::string>> values;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(path.string(), i + 1, "expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key != "fx" && key != "fy" && key != "cx" && key != "cy" && key != "width" && key != "height") {
      throw ParseError(path.string(), i + 1, "unknown key '" + key + "'");
    }
    if (!values.emplace(key, std::make_pair(i + 1, value)).second) {
      throw ParseError(path.string(), i + 1, "duplicate key '" + key + "'");
    }
  }
  for (const char* k : {"fx", "fy", "cx", "cy", "width", "height"}) {
    if (!values.count(k)) throw ParseError(path.string(), 0, std::string("missing key '") + k + "'");
  }
  auto real = [&](const char* k) {
    const auto& [line, v] = values.at(k);
    return LineParser(path, line).real(v, k);
  };
  auto integer = [&](const char* k) {
    const auto& [line, v] = values.at(k);
    const long long n = LineParser(path, line).integer(v, k);
    if (n <= 0 || n > 1'000'000) LineParser(path, line).fail(std::string(k) + " out of range");
    return static_cast<int>(n);
  };
  geom3d::CameraIntrinsics intr{real("fx"), real("fy"), real("cx"), real("cy"), integer("width"),
                                integer("height")};
  intr.validate();
  return intr;
}

void write_intrinsics(const fs::path& path, const geom3d::CameraIntrinsics& intr) {
  std::string s;
  s += "fx=" + format_double(intr.fx) + '\n';
  s += "fy=" + format_double(intr.fy) + '\n';
  s += "cx=" + format_double(intr.cx) + '\n';
  s += "cy=" + format_double(intr.cy) + '\n';
  s += "width=" + std::to_string(intr.width) + '\n';
  s += "height=" + std::to_string(intr.height) + '\n';
  write_file_atomic(path, s);
}

// ---------------------------------------------------------------------------
// Descriptor store

fs::path ids_sidecar(const fs::path& path) {
  fs::path p = path;
  p += ".ids";
  return p;
}

DescriptorStore read_descriptors(const fs::path& path) {
  ByteReader r(read_file(path), path.string());
  r.magic("GDSC");
  const std::uint32_t dim = r.u32();
  const std::uint64_t count = r.u64();
  if (dim == 0) throw ParseError(path.string(), 0, "descriptor dimension is zero");
  if (r.remaining() != count * dim * 4) throw ParseError(path.string(), 0, "payload size mismatch");
  DescriptorStore store;
  store.rows.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::uint32_t j = 0; j < dim; ++j) {
      store.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.f32();
    }
  }
  r.expect_end();
  const fs::path ids_path = ids_sidecar(path);
  store.ids = read_lines(ids_path);
  if (store.ids.size() != count) {
    throw ParseError(ids_path.string(), 0,
                     "expected " + std::to_string(count) + " ids, got " + std::to_string(store.ids.size()));
  }
  for (std::size_t i = 0; i < store.ids.size(); ++i) {
    if (store.ids[i].empty()) throw ParseError(ids_path.string(), i + 1, "empty id");
  }
  return store;
}

void write_descriptors(const fs::path& path, const DescriptorStore& store) {
  if (static_cast<Eigen::Index>(store.ids.size()) != store.rows.rows()) {
    throw InvalidInput("descriptor ids and rows differ in count");
  }
  ByteWriter w;
  w.magic("GDSC");
  w.u32(static_cast<std::uint32_t>(store.rows.cols()));
  w.u64(static_cast<std::uint64_t>(store.rows.rows()));
  for (Eigen::Index i = 0; i < store.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < store.rows.cols(); ++j) w.f32(store.rows(i, j));
  }
  std::string ids;
  for (const auto& id : store.ids) ids += id + '\n';
  write_file_atomic(ids_sidecar(path), ids);
  write_file_atomic(path, w.bytes());
}

// ---------------------------------------------------------------------------
// Model checkpoint

std::string model_bytes(const embed::EmbeddingModel& model) {
  ByteWriter w;
  w.magic("GSIM");
  w.u16(kModelVersion);
  w.u32(static_cast<std::uint32_t>(model.layers().size()));
  w.u8(model.output_normalize() ? 1 : 0);
  for (const auto& l : model.layers()) {
    w.u32(static_cast<std::uint32_t>(l.weight.cols()));
    w.u32(static_cast<std::uint32_t>(l.weight.rows()));
  }
  for (const auto& l : model.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.f32(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) w.f32(l.bias(r));
  }
  return std::move(w.bytes());
}

void save_model(const fs::path& path, const embed::EmbeddingModel& model,
                std::string_view metadata_json) {
  fs::path meta = path;
  meta += ".json";
  write_file_atomic(meta, metadata_json);
  write_file_atomic(path, model_bytes(model));
}

embed::EmbeddingModel load_model(const fs::path& path) {
  ByteReader r(read_file(path), path.string());
  r.magic("GSIM");
  const std::uint16_t version = r.u16();
  if (version != kModelVersion) {
    throw ParseError(path.string(), 0, "unsupported model version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  if (count < 1 || count > 3) throw ParseError(path.string(), 0, "layer count must be 1..3");
  const bool normalize = r.u8() != 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dims;
  for (std::uint32_t l = 0; l < count; ++l) {
    const std::uint32_t in = r.u32();
    const std::uint32_t out = r.u32();
    dims.emplace_back(in, out);
  }
  std::vector<embed::DenseLayer> layers;
  for (const auto& [in, out] : dims) {
    embed::DenseLayer l{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (Eigen::Index row = 0; row < l.weight.rows(); ++row) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(row, c) = r.f32();
    }
    for (Eigen::Index row = 0; row < l.bias.size(); ++row) l.bias(row) = r.f32();
    layers.push_back(std::move(l));
  }
  r.expect_end();
  try {
    return embed::EmbeddingModel(std::move(layers), normalize);
  } catch (const InvalidInput& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

// ---------------------------------------------------------------------------
// Whitening transform

void save_whitening(const fs::path& path, const retrieval::WhitenTransform& t) {
  ByteWriter w;
  w.magic("GPCA");
  w.u16(kWhitenVersion);
  w.u32(static_cast<std::uint32_t>(t.input_dim()));
  w.u32(static_cast<std::uint32_t>(t.output_dim()));
  w.u8(t.renormalize ? 1 : 0);
  for (Eigen::Index i = 0; i < t.mean.size(); ++i) w.f32(t.mean(i));
  for (Eigen::Index i = 0; i < t.eigenvalues.size(); ++i) w.f32(t.eigenvalues(i));
  for (Eigen::Index r = 0; r < t.projection.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.projection.cols(); ++c) w.f32(t.projection(r, c));
  }
  write_file_atomic(path, w.bytes());
}

retrieval::WhitenTransform load_whitening(const fs::path& path) {
  ByteReader r(read_file(path), path.string());
  r.magic("GPCA");
  const std::uint16_t version = r.u16();
  if (version != kWhitenVersion) {
    throw ParseError(path.string(), 0, "unsupported whitening version " + std::to_string(version));
  }
  const auto in = static_cast<Eigen::Index>(r.u32());
  const auto out = static_cast<Eigen::Index>(r.u32());
  if (in == 0 || out == 0 || out > in) throw ParseError(path.string(), 0, "bad whitening dimensions");
  retrieval::WhitenTransform t;
  t.renormalize = r.u8() != 0;
  t.mean.resize(in);
  t.eigenvalues.resize(out);
  t.projection.resize(out, in);
  for (Eigen::Index i = 0; i < in; ++i) t.mean(i) = r.f32();
  for (Eigen::Index i = 0; i < out; ++i) t.eigenvalues(i) = r.f32();
  for (Eigen::Index row = 0; row < out; ++row) {
    for (Eigen::Index c = 0; c < in; ++c) t.projection(row, c) = r.f32();
  }
  r.expect_end();
  return t;
}

// ---------------------------------------------------------------------------
// Ranked results and traces

eval::ResultSet read_results(const fs::path& path) {
  eval::ResultSet results;
  std::map<std::string, std::size_t> index;
  const auto lines = read_lines(path);
  for (const auto& [line, f] : csv_rows(path, lines, "query_id,rank,map_id,distance")) {
    LineParser p(path, line);
    const std::string q = p.id(f[0]);
    const long long rank = p.integer(f[1], "rank");
    auto [it, inserted] = index.emplace(q, results.size());
    if (inserted) results.push_back({q, {}});
    auto& matches = results[it->second].matches;
    if (rank != static_cast<long long>(matches.size()) + 1) {
      p.fail("ranks for query '" + q + "' must be consecutive from 1");
    }
    const double d = p.real(f[3], "distance");
    if (!matches.empty() && d < matches.back().distance) p.fail("distances must be ascending");
    matches.push_back({p.id(f[2]), d});
  }
  return results;
}

void write_results(const fs::path& path, const eval::ResultSet& results) {
  std::string s = "query_id,rank,map_id,distance\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.matches.size(); ++i) {
      s += r.query_id + ',' + std::to_string(i + 1) + ',' + r.matches[i].map_id + ',' +
           format_double(r.matches[i].distance) + '\n';
    }
  }
  write_file_atomic(path, s);
}

void write_loss_trace(const fs::path& path, std::span<const train::BatchRecord> trace) {
  std::string s = "batch,pairs_seen,lr,loss\n";
  for (const auto& b : trace) {
    s += std::to_string(b.batch) + ',' + std::to_string(b.pairs_seen) + ',' + format_double(b.lr) +
         ',' + format_double(b.loss) + '\n';
  }
  write_file_atomic(path, s);
}

}  // namespace gcl::io
