#pragma once

#include <cstdint>
#include <vector>

// Central finite-difference checks of the analytic loss and model gradients.
namespace gcl::gradcheck {

struct Options {
  std::vector<std::size_t> dims{8, 12, 6};  // input, hidden..., output
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  double step = 1e-5;
  double tolerance = 1e-4;
};

struct Report {
  std::size_t trials = 0;
  std::size_t loss_checks = 0;   // scalar and descriptor-level comparisons
  std::size_t model_checks = 0;  // individual parameter comparisons
  double max_loss_error = 0.0;
  double max_model_error = 0.0;
  std::size_t failures = 0;

  double max_error() const { return max_loss_error > max_model_error ? max_loss_error : max_model_error; }
  bool passed() const { return failures == 0; }
};

// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6)
double relative_error(double analytic, double numeric);

// Each trial draws a random distance/psi/margin and a random siamese model
// with inputs, then compares every gradient entry for both loss kinds.
// Configurations within a small band of a kink (ReLU at zero, d at the
// margin) are redrawn, since finite differences are meaningless there.
Report run(const Options& options);

}  // namespace gcl::gradcheck
