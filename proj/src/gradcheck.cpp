#include "gcl/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "gcl/embed.hpp"
#include "gcl/error.hpp"
#include "gcl/loss.hpp"
#include "gcl/rng.hpp"

namespace gcl::gradcheck {
namespace {

// Kinks closer than this to the evaluation point cause a redraw.
constexpr double kKinkBand = 1e-3;
constexpr int kMaxRedraws = 1000;

Eigen::VectorXd random_vector(Rng& rng, std::size_t n) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return v;
}

bool near_relu_kink(const embed::ForwardTrace& t) {
  // The last pre-activation has no ReLU.
  for (std::size_t l = 0; l + 1 < t.pre_activations.size(); ++l) {
    if ((t.pre_activations[l].array().abs() < kKinkBand).any()) return true;
  }
  return false;
}

double pair_loss_value(const embed::EmbeddingModel& m, const Eigen::VectorXd& a,
                       const Eigen::VectorXd& b, double psi, const loss::LossConfig& cfg,
                       loss::LossKind kind) {
  const double d = loss::l2_distance(embed::forward(m, a).values, embed::forward(m, b).values);
  return loss::pair_loss(d, psi, cfg, kind).loss;
}

class Tally {
 public:
  Tally(double tolerance, std::size_t& checks, double& max_error, std::size_t& failures)
      : tol_(tolerance), checks_(checks), max_(max_error), failures_(failures) {}
  void operator()(double analytic, double numeric) {
    const double e = relative_error(analytic, numeric);
    ++checks_;
    max_ = std::max(max_, e);
    if (!(e <= tol_)) ++failures_;
  }

 private:
  double tol_;
  std::size_t& checks_;
  double& max_;
  std::size_t& failures_;
};

void check_loss_level(Rng& rng, const Options& o, Tally& tally) {
  loss::LossConfig cfg;
  cfg.margin_tau = rng.uniform(0.2, 1.5);
  double d = 0.0;
  do {
    d = rng.uniform(0.01, 2.0 * cfg.margin_tau);
  } while (std::abs(d - cfg.margin_tau) < kKinkBand);
  const double psi = rng.uniform();
  const double h = o.step;

  for (const auto kind : {loss::LossKind::Generalized, loss::LossKind::Contrastive}) {
    const double analytic = loss::pair_loss(d, psi, cfg, kind).dloss_dd;
    const double numeric = (loss::pair_loss(d + h, psi, cfg, kind).loss -
                            loss::pair_loss(d - h, psi, cfg, kind).loss) /
                           (2.0 * h);
    tally(analytic, numeric);
  }

  // Through the distance into the two descriptors.
  const std::size_t dim = o.dims.back();
  Eigen::VectorXd a = random_vector(rng, dim);
  Eigen::VectorXd b = random_vector(rng, dim);
  const double dist = (a - b).norm();
  if (dist < 1e-6 || std::abs(dist - cfg.margin_tau) < kKinkBand) return;
  const auto g = loss::gcl_descriptor_gradients(a, b, psi, cfg);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (int side = 0; side < 2; ++side) {
      Eigen::VectorXd& v = side == 0 ? a : b;
      const double saved = v(i);
      v(i) = saved + h;
      const double up = loss::gcl_loss(loss::l2_distance(a, b), psi, cfg).loss;
      v(i) = saved - h;
      const double down = loss::gcl_loss(loss::l2_distance(a, b), psi, cfg).loss;
      v(i) = saved;
      tally(side == 0 ? g.grad_a(i) : g.grad_b(i), (up - down) / (2.0 * h));
    }
  }
}

void check_model_level(Rng& rng, const Options& o, Tally& tally) {
  loss::LossConfig cfg;
  const bool normalize = rng.uniform() < 0.5;
  const auto kind = rng.uniform() < 0.5 ? loss::LossKind::Generalized : loss::LossKind::Contrastive;
  const double psi = rng.uniform();

  embed::EmbeddingModel model;
  Eigen::VectorXd a, b;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxRedraws) throw RuntimeFailure("could not draw a configuration away from kinks");
    model = embed::EmbeddingModel::initialized(o.dims, normalize, rng.next_u64());
    a = random_vector(rng, o.dims.front());
    b = random_vector(rng, o.dims.front());
    const auto ta = embed::forward_trace(model, a);
    const auto tb = embed::forward_trace(model, b);
    if (near_relu_kink(ta) || near_relu_kink(tb)) continue;
    if (ta.output.degenerate || tb.output.degenerate) continue;
    // Keep d around the margin so both loss branches are exercised.
    const double d = loss::l2_distance(ta.output.values, tb.output.values);
    if (d < 1e-3 || std::abs(d - cfg.margin_tau) < kKinkBand) continue;
    break;
  }

  const Eigen::VectorXd analytic = embed::backward_pair(model, a, b, psi, cfg, kind).grads.flatten();
  Eigen::VectorXd params = model.flatten();
  const double h = o.step;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double saved = params(i);
    params(i) = saved + h;
    model.assign(params);
    const double up = pair_loss_value(model, a, b, psi, cfg, kind);
    params(i) = saved - h;
    model.assign(params);
    const double down = pair_loss_value(model, a, b, psi, cfg, kind);
    params(i) = saved;
    tally(analytic(i), (up - down) / (2.0 * h));
  }
  model.assign(params);
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

Report run(const Options& options) {
  if (options.dims.size() < 2 || options.dims.size() > 4) {
    throw InvalidInput("gradcheck dims need an input, up to two hidden sizes and an output");
  }
  for (std::size_t d : options.dims) {
    if (d == 0) throw InvalidInput("gradcheck dims must be positive");
  }
  if (!(options.step > 0.0) || !(options.tolerance > 0.0)) {
    throw InvalidInput("gradcheck step and tolerance must be positive");
  }

  Report report;
  report.trials = options.trials;
  Rng rng(options.seed);
  Tally loss_tally(options.tolerance, report.loss_checks, report.max_loss_error, report.failures);
  Tally model_tally(options.tolerance, report.model_checks, report.max_model_error, report.failures);
  for (std::size_t t = 0; t < options.trials; ++t) {
    check_loss_level(rng, options, loss_tally);
    check_model_level(rng, options, model_tally);
  }
  return report;
}

}  // namespace gcl::gradcheck
