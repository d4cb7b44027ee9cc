#include "nsub/adam.hpp"

#include <cmath>

#include "nsub/error.hpp"

namespace nsub {

AdamState AdamState::for_bundle(const NetworkBundle& bundle, const AdamOptions& options) {
  AdamState s;
  s.options = options;
  s.first_moment = bundle.zeros_like();
  s.second_moment = bundle.zeros_like();
  return s;
}

namespace {

bool same_shape(const MLPParams& a, const MLPParams& b) {
  return a.input_dim() == b.input_dim() && a.hidden_dim() == b.hidden_dim() &&
         a.output_dim() == b.output_dim();
}

bool same_shape(const NetworkBundle& a, const NetworkBundle& b) {
  return same_shape(a.init, b.init) && same_shape(a.vertex, b.vertex) && same_shape(a.edge, b.edge);
}

}  // namespace

bool adam_step(AdamState& state, NetworkBundle& params, const NetworkBundle& grad) {
  if (!same_shape(params, grad) || !same_shape(params, state.first_moment) ||
      !same_shape(params, state.second_moment)) {
    throw DimensionError("optimizer state, parameters and gradient shapes differ");
  }
  if (!grad.init.all_finite() || !grad.vertex.all_finite() || !grad.edge.all_finite()) {
    return false;
  }
  const AdamOptions& o = state.options;
  ++state.step;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.step));
  MLPParams* p[3] = {&params.init, &params.vertex, &params.edge};
  const MLPParams* g[3] = {&grad.init, &grad.vertex, &grad.edge};
  MLPParams* m[3] = {&state.first_moment.init, &state.first_moment.vertex, &state.first_moment.edge};
  MLPParams* v[3] = {&state.second_moment.init, &state.second_moment.vertex,
                     &state.second_moment.edge};
  for (int k = 0; k < 3; ++k) {
    auto pb = p[k]->blocks();
    auto gb = g[k]->blocks();
    auto mb = m[k]->blocks();
    auto vb = v[k]->blocks();
    for (int b = 0; b < 6; ++b) {
      for (size_t i = 0; i < pb[b].size(); ++i) {
        const double gi = gb[b][i];
        mb[b][i] = o.beta1 * mb[b][i] + (1.0 - o.beta1) * gi;
        vb[b][i] = o.beta2 * vb[b][i] + (1.0 - o.beta2) * gi * gi;
        const double mhat = mb[b][i] / c1;
        const double vhat = vb[b][i] / c2;
        pb[b][i] -= o.learning_rate * mhat / (std::sqrt(vhat) + o.epsilon);
      }
    }
  }
  return true;
}

}  // namespace nsub
