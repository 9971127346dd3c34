#include "gcl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gcl/error.hpp"
#include "gcl/rng.hpp"

namespace gcl::synth {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
// Per-image nuisance (lighting, season) that the features also encode.
constexpr int kNuisanceDims = 2;
constexpr double kNuisanceWeight = 0.6;

// Random Fourier features approximating a unit RBF kernel on the inputs.
class FourierMap {
 public:
  FourierMap(Rng& rng, Eigen::Index in, Eigen::Index out)
      : freq_(out, in), phase_(out), scale_(std::sqrt(2.0 / static_cast<double>(out))) {
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) freq_(r, c) = rng.normal();
      phase_(r) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
  }
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    return scale_ * (freq_ * x + phase_).array().cos().matrix();
  }

 private:
  Eigen::MatrixXd freq_;
  Eigen::VectorXd phase_;
  double scale_;
};

double street_heading(Rng& rng, double jitter_deg) {
  const double base = 90.0 * static_cast<double>(rng.index(4));
  return normalize_degrees(base + rng.uniform(-jitter_deg, jitter_deg));
}

struct FeatureModel {
  const CityOptions& o;
  FourierMap view;
  FourierMap nuisance;

  Eigen::VectorXd operator()(Rng& rng, const CameraPose2D& p) const {
    const double h = p.heading_deg * kDegToRad;
    const double ahead_x = p.t0 + o.look_ahead_m * std::sin(h);
    const double ahead_y = p.t1 + o.look_ahead_m * std::cos(h);
    // Headings heading_scale_deg apart end up at unit distance.
    const double heading_weight = 1.0 / (2.0 * std::sin(0.5 * o.heading_scale_deg * kDegToRad));
    Eigen::VectorXd z(4);
    z << ahead_x / o.length_scale_m, ahead_y / o.length_scale_m, heading_weight * std::sin(h),
        heading_weight * std::cos(h);
    Eigen::VectorXd n(kNuisanceDims);
    for (Eigen::Index i = 0; i < n.size(); ++i) n(i) = rng.normal();
    Eigen::VectorXd f = view(z) + kNuisanceWeight * nuisance(n);
    const double noise_sd = o.noise * std::sqrt(1.0 / static_cast<double>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) += noise_sd * rng.normal();
    return f;
  }
};

Eigen::MatrixXd features_for(Rng& rng, const FeatureModel& model,
                             const std::vector<CameraPose2D>& poses, std::size_t dim) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(poses.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < poses.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = model(rng, poses[i]).transpose();
  }
  return out;
}

}  // namespace

void CityOptions::validate() const {
  if (maps == 0) throw InvalidInput("city2d needs at least one map camera");
  if (feature_dim == 0) throw InvalidInput("feature_dim must be positive");
  for (double v : {grid_spacing_m, look_ahead_m, length_scale_m}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("city2d lengths must be positive");
  }
  if (!(heading_scale_deg > 0.0 && heading_scale_deg <= 180.0)) {
    throw InvalidInput("heading_scale_deg must be in (0, 180]");
  }
  for (double v : {position_jitter_m, heading_jitter_deg, noise}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("city2d jitter and noise must be >= 0");
  }
}

CityScenario city2d(const CityOptions& o) {
  o.validate();
  Rng rng(o.seed);
  CityScenario s;

  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(o.maps))));
  const auto rows = (o.maps + cols - 1) / cols;
  const double extent_x = static_cast<double>(cols - 1) * o.grid_spacing_m;
  const double extent_y = static_cast<double>(rows - 1) * o.grid_spacing_m;

  for (std::size_t i = 0; i < o.maps; ++i) {
    CameraPose2D p;
    p.id = make_id("m", i, o.maps);
    p.t0 = static_cast<double>(i % cols) * o.grid_spacing_m +
           rng.uniform(-o.position_jitter_m, o.position_jitter_m);
    p.t1 = static_cast<double>(i / cols) * o.grid_spacing_m +
           rng.uniform(-o.position_jitter_m, o.position_jitter_m);
    p.heading_deg = street_heading(rng, o.heading_jitter_deg);
    s.maps.push_back(std::move(p));
  }
  auto scatter = [&](std::string_view prefix, std::size_t count) {
    std::vector<CameraPose2D> out;
    for (std::size_t i = 0; i < count; ++i) {
      CameraPose2D p;
      p.id = make_id(prefix, i, count);
      p.t0 = rng.uniform(0.0, extent_x);
      p.t1 = rng.uniform(0.0, extent_y);
      p.heading_deg = street_heading(rng, o.heading_jitter_deg);
      out.push_back(std::move(p));
    }
    return out;
  };
  s.queries = scatter("q", o.queries);
  s.train_queries = scatter("t", o.train_queries);

  const FeatureModel model{o, FourierMap(rng, 4, static_cast<Eigen::Index>(o.feature_dim)),
                           FourierMap(rng, kNuisanceDims, static_cast<Eigen::Index>(o.feature_dim))};
  s.map_features = features_for(rng, model, s.maps, o.feature_dim);
  s.query_features = features_for(rng, model, s.queries, o.feature_dim);
  s.train_features = features_for(rng, model, s.train_queries, o.feature_dim);
  return s;
}

void CloudOptions::validate() const {
  if (poses == 0 || points == 0) throw InvalidInput("cloud3d needs poses and points");
  for (double v : {room_x_m, room_y_m}) {
    if (!(v > 4.0) || !std::isfinite(v)) throw InvalidInput("cloud3d room floor sides must exceed 4 m");
  }
  if (!(room_z_m > 1.5) || !std::isfinite(room_z_m)) {
    throw InvalidInput("cloud3d room must be taller than the 1.5 m camera height");
  }
}

Eigen::Quaterniond level_camera(double heading_deg) {
  const double h = heading_deg * kDegToRad;
  Eigen::Matrix3d r;
  r.col(0) = Eigen::Vector3d(std::cos(h), -std::sin(h), 0.0);  // right
  r.col(1) = Eigen::Vector3d(0.0, 0.0, -1.0);                  // down
  r.col(2) = Eigen::Vector3d(std::sin(h), std::cos(h), 0.0);   // forward
  Eigen::Quaterniond q(r);
  q.normalize();
  return q;
}

CloudScenario cloud3d(const CloudOptions& o) {
  o.validate();
  Rng rng(o.seed);
  CloudScenario s;
  const double x = o.room_x_m, y = o.room_y_m, z = o.room_z_m;
  // Faces weighted by area: two x walls, two y walls, floor, ceiling.
  const double areas[6] = {y * z, y * z, x * z, x * z, x * y, x * y};
  double total = 0.0;
  for (double a : areas) total += a;
  s.cloud.points.reserve(o.points);
  for (std::size_t i = 0; i < o.points; ++i) {
    double pick = rng.uniform(0.0, total);
    int face = 0;
    while (face < 5 && pick >= areas[face]) pick -= areas[face++];
    const double u = rng.uniform(), v = rng.uniform();
    switch (face) {
      case 0: s.cloud.points.emplace_back(0.0, u * y, v * z); break;
      case 1: s.cloud.points.emplace_back(x, u * y, v * z); break;
      case 2: s.cloud.points.emplace_back(u * x, 0.0, v * z); break;
      case 3: s.cloud.points.emplace_back(u * x, y, v * z); break;
      case 4: s.cloud.points.emplace_back(u * x, v * y, 0.0); break;
      default: s.cloud.points.emplace_back(u * x, v * y, z); break;
    }
  }
  for (std::size_t i = 0; i < o.poses; ++i) {
    Pose6DOF p;
    p.id = make_id("c", i, o.poses);
    p.translation = {rng.uniform(2.0, x - 2.0), rng.uniform(2.0, y - 2.0), 1.5};
    p.rotation = level_camera(rng.uniform(0.0, 360.0));
    s.poses.push_back(std::move(p));
  }
  s.intrinsics = {320.0, 320.0, 320.0, 240.0, 640, 480};
  return s;
}

std::string make_id(std::string_view prefix, std::size_t index, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t m = count > 0 ? count - 1 : 0; m >= 10; m /= 10) ++width;
  std::string digits = std::to_string(index);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(prefix) + digits;
}

}  // namespace gcl::synth
