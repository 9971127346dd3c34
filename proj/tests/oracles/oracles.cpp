#include "oracles/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>

namespace oracle {
namespace {

constexpr double kPi = std::numbers::pi;

struct Box {
  double x0, y0, x1, y1;
};

// Compass bearing of (dx, dy) in [0, 360).
double bearing_deg(double dx, double dy) {
  double b = std::atan2(dx, dy) * 180.0 / kPi;
  if (b < 0.0) b += 360.0;
  return b;
}

Box sector_box(const Sector& s) {
  Box b{s.cx, s.cy, s.cx, s.cy};
  auto include = [&](double bearing) {
    const double x = s.cx + s.radius * std::sin(bearing * kPi / 180.0);
    const double y = s.cy + s.radius * std::cos(bearing * kPi / 180.0);
    b.x0 = std::min(b.x0, x);
    b.x1 = std::max(b.x1, x);
    b.y0 = std::min(b.y0, y);
    b.y1 = std::max(b.y1, y);
  };
  include(s.heading_deg - s.theta_deg / 2.0);
  include(s.heading_deg + s.theta_deg / 2.0);
  for (double axis : {0.0, 90.0, 180.0, 270.0}) {
    if (heading_gap_deg(axis, s.heading_deg) <= s.theta_deg / 2.0) include(axis);
  }
  return b;
}

}  // namespace

double heading_gap_deg(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

bool in_sector(const Sector& s, double x, double y) {
  const double dx = x - s.cx, dy = y - s.cy;
  if (dx * dx + dy * dy > s.radius * s.radius) return false;
  if (s.theta_deg >= 360.0) return true;
  if (dx == 0.0 && dy == 0.0) return true;
  return heading_gap_deg(bearing_deg(dx, dy), s.heading_deg) <= s.theta_deg / 2.0;
}

MonteCarloOverlap monte_carlo(const Sector& a, const Sector& b, std::size_t samples, std::uint64_t seed) {
  const Box ba = sector_box(a), bb = sector_box(b);
  const Box u{std::min(ba.x0, bb.x0), std::min(ba.y0, bb.y0), std::max(ba.x1, bb.x1),
              std::max(ba.y1, bb.y1)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(u.x0, u.x1), uy(u.y0, u.y1);
  std::size_t in_a = 0, in_b = 0, both = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = ux(rng), y = uy(rng);
    const bool ia = in_sector(a, x, y), ib = in_sector(b, x, y);
    in_a += ia;
    in_b += ib;
    both += ia && ib;
  }
  MonteCarloOverlap out;
  out.ioa = in_a == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(in_a);
  const std::size_t uni = in_a + in_b - both;
  out.iou = uni == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(uni);
  return out;
}

double monte_carlo_overlap(const Sector& a, const Sector& b, gcl::geom2d::OverlapMode mode,
                           std::size_t samples, std::uint64_t seed) {
  const auto r = monte_carlo(a, b, samples, seed);
  return mode == gcl::geom2d::OverlapMode::IntersectionOverArea ? r.ioa : r.iou;
}

std::vector<std::uint32_t> visible_indices(const std::vector<Eigen::Vector3d>& points,
                                           const gcl::Pose6DOF& pose,
                                           const gcl::geom3d::CameraIntrinsics& intr) {
  const double w = pose.rotation.w(), x = pose.rotation.x(), y = pose.rotation.y(),
               z = pose.rotation.z();
  // Camera-to-world rotation matrix.
  const double r[3][3] = {
      {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
      {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
      {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)},
  };
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d[3];
    for (int k = 0; k < 3; ++k) d[k] = points[i][k] - pose.translation[k];
    double c[3];
    // Transpose applied: world-to-camera.
    for (int row = 0; row < 3; ++row) c[row] = r[0][row] * d[0] + r[1][row] * d[1] + r[2][row] * d[2];
    if (!(c[2] > 0.0)) continue;
    const double u = intr.fx * c[0] / c[2] + intr.cx;
    const double v = intr.fy * c[1] / c[2] + intr.cy;
    if (u >= 0.0 && u < intr.width && v >= 0.0 && v < intr.height) {
      out.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

std::vector<double> mlp_forward(const gcl::embed::EmbeddingModel& model, const std::vector<double>& input) {
  std::vector<double> act = input;
  const auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& w = layers[l].weight;
    std::vector<double> next(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index o = 0; o < w.rows(); ++o) {
      double s = layers[l].bias(o);
      for (Eigen::Index i = 0; i < w.cols(); ++i) s += w(o, i) * act[static_cast<std::size_t>(i)];
      if (l + 1 < layers.size() && s < 0.0) s = 0.0;
      next[static_cast<std::size_t>(o)] = s;
    }
    act = std::move(next);
  }
  if (model.output_normalize()) {
    double n = 0.0;
    for (double v : act) n += v * v;
    n = std::sqrt(n);
    for (double& v : act) v = n < 1e-12 ? 0.0 : v / n;
  }
  return act;
}

Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 Eigen::VectorXd x, double step) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x(i);
    x(i) = saved + step;
    const double up = f(x);
    x(i) = saved - step;
    const double down = f(x);
    x(i) = saved;
    g(i) = (up - down) / (2.0 * step);
  }
  return g;
}

double recall_at_k(const std::vector<Ranked>& results, const std::vector<std::string>& all_maps,
                   const IsPositive& positive, std::size_t k) {
  std::size_t counted = 0, hits = 0;
  for (const auto& r : results) {
    bool any = false;
    for (const auto& m : all_maps) any = any || positive(r.query, m);
    if (!any) continue;
    ++counted;
    bool hit = false;
    for (std::size_t i = 0; i < r.maps.size() && i < k; ++i) hit = hit || positive(r.query, r.maps[i]);
    hits += hit;
  }
  return counted == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(counted);
}

double average_precision(const std::vector<double>& distances, const std::vector<int>& labels) {
  std::map<double, std::pair<std::size_t, std::size_t>> levels;  // distance -> (pos, neg)
  std::size_t total_pos = 0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    auto& lv = levels[distances[i]];
    if (labels[i]) {
      ++lv.first;
      ++total_pos;
    } else {
      ++lv.second;
    }
  }
  double area = 0.0;
  std::size_t tp = 0, seen = 0;
  for (const auto& [d, counts] : levels) {
    seen += counts.second;
    for (std::size_t j = 0; j < counts.first; ++j) {
      ++tp;
      ++seen;
      // Each positive adds a recall step of 1/total_pos at the current precision.
      area += static_cast<double>(tp) / static_cast<double>(seen);
    }
  }
  return area / static_cast<double>(total_pos);
}

double localized_fraction(const std::vector<PoseErrorInput>& errors, double max_m, double max_deg) {
  if (errors.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& e : errors) {
    const double t = std::sqrt(e.dx * e.dx + e.dy * e.dy + e.dz * e.dz);
    ok += (t <= max_m && e.rotation_deg <= max_deg);
  }
  return static_cast<double>(ok) / static_cast<double>(errors.size());
}

MahalanobisMetric::MahalanobisMetric(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows(), d = rows.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) mean += rows.row(i).transpose();
  mean /= static_cast<double>(n);
  cov_ = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd c = rows.row(i).transpose() - mean;
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) cov_(a, b) += c(a) * c(b);
    }
  }
  cov_ /= static_cast<double>(n - 1);
}

double MahalanobisMetric::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  const Eigen::VectorXd diff = x - y;
  const Eigen::VectorXd solved = cov_.llt().solve(diff);
  return std::sqrt(std::max(0.0, diff.dot(solved)));
}

double rank_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::size_t less = 0, equal = 0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        less += v[j] < v[i];
        equal += v[j] == v[i];
      }
      r[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
