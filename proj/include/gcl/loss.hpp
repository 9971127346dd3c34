#pragma once

#include <Eigen/Core>

// Contrastive (binary) and Generalized Contrastive (graded) losses, with their
// derivatives with respect to the descriptor distance and the descriptors.
namespace gcl::loss {

struct LossConfig {
  double margin_tau = 0.5;
  // psi strictly above this counts as a positive when binary labels are needed.
  double positive_threshold = 0.5;

  void validate() const;
};

enum class LossKind {
  Contrastive,  // binary labels derived from psi
  Generalized,  // psi used directly
};

struct PairLossResult {
  double loss = 0.0;
  double dloss_dd = 0.0;  // derivative with respect to the distance d
};

// Euclidean distance. Throws InvalidInput on dimension mismatch.
double l2_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

//   y = 1: d^2 / 2                 grad d
//   y = 0: max(tau - d, 0)^2 / 2   grad min(d - tau, 0)
PairLossResult cl_loss(double d, int label, const LossConfig& cfg);

//   psi d^2 / 2 + (1 - psi) max(tau - d, 0)^2 / 2
// grad d + tau (psi - 1) below the margin and d psi at or beyond it.
PairLossResult gcl_loss(double d, double psi, const LossConfig& cfg);

// 1 iff psi > positive_threshold.
int binary_label_from_psi(double psi, const LossConfig& cfg);

// Dispatch on kind; the Contrastive kind thresholds psi first.
PairLossResult pair_loss(double d, double psi, const LossConfig& cfg, LossKind kind);

struct DescriptorGradients {
  Eigen::VectorXd grad_a;
  Eigen::VectorXd grad_b;
  double loss = 0.0;
};

// Chain rule through d = |a - b|. At d = 0 both gradients are zero.
DescriptorGradients gcl_descriptor_gradients(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                             double psi, const LossConfig& cfg,
                                             LossKind kind = LossKind::Generalized);

}  // namespace gcl::loss
