#pragma once

#include "nsub/network.hpp"

namespace nsub {

struct AdamOptions {
  double learning_rate = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates shaped like a NetworkBundle.
struct AdamState {
  AdamOptions options;
  NetworkBundle first_moment;
  NetworkBundle second_moment;
  long long step = 0;

  static AdamState for_bundle(const NetworkBundle& bundle, const AdamOptions& options = {});
};

/// Bias-corrected ADAM update of `params`. Returns false and leaves both
/// `params` and `state` untouched when `grad` has a non-finite entry.
bool adam_step(AdamState& state, NetworkBundle& params, const NetworkBundle& grad);

}  // namespace nsub
