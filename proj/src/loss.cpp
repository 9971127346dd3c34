#include "gcl/loss.hpp"

#include <algorithm>
#include <cmath>

#include "gcl/error.hpp"

namespace gcl::loss {
namespace {

void check_distance(double d) {
  if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidInput("distance must be finite and >= 0");
}

void check_psi(double psi) {
  if (!(psi >= 0.0 && psi <= 1.0)) throw InvalidInput("psi must be in [0, 1]");
}

}  // namespace

void LossConfig::validate() const {
  if (!(margin_tau > 0.0) || !std::isfinite(margin_tau)) throw InvalidInput("margin must be > 0");
  if (!(positive_threshold > 0.0 && positive_threshold < 1.0)) {
    throw InvalidInput("positive threshold must be in (0, 1)");
  }
}

double l2_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidInput("descriptor dimensions differ");
  return (a - b).norm();
}

PairLossResult cl_loss(double d, int label, const LossConfig& cfg) {
  check_distance(d);
  if (label == 1) return {0.5 * d * d, d};
  if (label != 0) throw InvalidInput("binary label must be 0 or 1");
  const double slack = std::max(cfg.margin_tau - d, 0.0);
  return {0.5 * slack * slack, std::min(d - cfg.margin_tau, 0.0)};
}

PairLossResult gcl_loss(double d, double psi, const LossConfig& cfg) {
  check_distance(d);
  check_psi(psi);
  const double slack = std::max(cfg.margin_tau - d, 0.0);
  const double loss = psi * (0.5 * d * d) + (1.0 - psi) * (0.5 * slack * slack);
  const double grad = d < cfg.margin_tau ? d + cfg.margin_tau * (psi - 1.0) : d * psi;
  return {loss, grad};
}

int binary_label_from_psi(double psi, const LossConfig& cfg) {
  return psi > cfg.positive_threshold ? 1 : 0;
}

PairLossResult pair_loss(double d, double psi, const LossConfig& cfg, LossKind kind) {
  if (kind == LossKind::Contrastive) {
    check_psi(psi);
    return cl_loss(d, binary_label_from_psi(psi, cfg), cfg);
  }
  return gcl_loss(d, psi, cfg);
}

DescriptorGradients gcl_descriptor_gradients(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                             double psi, const LossConfig& cfg, LossKind kind) {
  if (a.size() != b.size()) throw InvalidInput("descriptor dimensions differ");
  const Eigen::VectorXd diff = a - b;
  const double d = diff.norm();
  const PairLossResult r = pair_loss(d, psi, cfg, kind);
  DescriptorGradients out;
  out.loss = r.loss;
  if (d == 0.0) {
    out.grad_a = Eigen::VectorXd::Zero(a.size());
  } else {
    out.grad_a = (r.dloss_dd / d) * diff;
  }
  out.grad_b = -out.grad_a;
  return out;
}

}  // namespace gcl::loss
