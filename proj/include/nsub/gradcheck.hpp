#pragma once

#include <cstdint>
#include <string>

namespace nsub {

struct GradCheckOptions {
  int levels = 2;
  double step = 1e-5;           ///< central-difference step
  double jitter = 0.05;         ///< vertex noise on the test icosahedron
  bool zero_bundle = false;     ///< check an all-zero network instead of a random one
  double relative_floor = 1e-6; ///< denominators below this count as this
};

struct GradCheckReport {
  int parameters = 0;
  double loss = 0.0;
  /// Over parameters whose +-step passes keep every ReLU on the same side
  /// of 0 as the unperturbed pass. Across a kink the central difference
  /// does not estimate the derivative, so those entries are only counted.
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  int kink_parameters = 0;
  double max_relative_error_all = 0.0;  ///< including kink crossings
  double max_gradient = 0.0;  ///< largest |analytic| entry
  std::string worst_parameter;  ///< e.g. "V.W2[3,17]"
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares the analytic gradient of the full multi-level loss w.r.t. every
/// network parameter with central finite differences on a jittered
/// icosahedron with Loop targets. Frames are frozen at the unperturbed pass,
/// matching the graph the analytic gradient differentiates. Deterministic per seed.
GradCheckReport grad_check(std::uint64_t seed, const GradCheckOptions& options = {});

}  // namespace nsub
