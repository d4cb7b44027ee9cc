#include "nsub/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "nsub/classic.hpp"
#include "nsub/loss.hpp"
#include "nsub/network.hpp"
#include "nsub/pipeline.hpp"
#include "nsub/shapes.hpp"

namespace nsub {

namespace {

// Loss with frames frozen at `base`; `kink` is set when any ReLU changed side.
double loss_of(const SubdivisionHierarchy& hierarchy, const Mesh& mesh, const NetworkBundle& bundle,
               const std::vector<std::vector<Vec3>>& targets, const ForwardTape& base, bool& kink) {
  ForwardTape tape;
  ForwardOutput fwd = forward_pipeline(hierarchy, mesh.vertices(), bundle, &tape, &base);
  auto same = [](const FlapPassTape& a, const FlapPassTape& b) {
    return ((a.cache.hidden1.array() > 0.0) == (b.cache.hidden1.array() > 0.0)).all() &&
           ((a.cache.hidden2.array() > 0.0) == (b.cache.hidden2.array() > 0.0)).all();
  };
  bool ok = same(tape.init, base.init);
  for (size_t l = 0; l < base.vertex.size() && ok; ++l) {
    ok = same(tape.vertex[l], base.vertex[l]) && same(tape.edge[l], base.edge[l]);
  }
  if (!ok) kink = true;
  std::vector<std::vector<Vec3>> predicted(fwd.positions.begin() + 1, fwd.positions.end());
  return loss_l2_levels(predicted, targets).value;
}

std::string parameter_name(int module, int block, size_t index, const MLPParams& p) {
  static const char* modules[3] = {"I", "V", "E"};
  const int layer = block / 2;
  std::string name = std::string(modules[module]) + (block % 2 ? ".b" : ".W") + std::to_string(layer + 1);
  if (block % 2) return name + "[" + std::to_string(index) + "]";
  // Blocks are column-major.
  const auto rows = static_cast<size_t>(p.weights[layer].rows());
  return name + "[" + std::to_string(index % rows) + "," + std::to_string(index / rows) + "]";
}

}  // namespace

GradCheckReport grad_check(std::uint64_t seed, const GradCheckOptions& options) {
  Mesh mesh = shapes::jitter(shapes::icosahedron(), options.jitter, seed);
  std::vector<std::vector<Vec3>> targets;
  Mesh level = mesh;
  for (int l = 0; l < options.levels; ++l) {
    level = loop_subdivide(level, 1);
    targets.push_back(level.vertices());
  }
  NetworkBundle bundle = options.zero_bundle ? NetworkBundle::zeros() : NetworkBundle::random(seed);
  if (!options.zero_bundle) {
    // Nonzero biases so that the bias gradients are exercised away from 0.
    std::mt19937_64 rng(seed ^ 0xb1a5ULL);
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    for (MLPParams* p : {&bundle.init, &bundle.vertex, &bundle.edge}) {
      for (auto& b : p->biases) {
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = dist(rng);
      }
    }
  }

  SubdivisionHierarchy hierarchy(mesh.shared_topology(), options.levels);
  ForwardTape tape;
  ForwardOutput fwd = forward_pipeline(hierarchy, mesh.vertices(), bundle, &tape);
  std::vector<std::vector<Vec3>> predicted(fwd.positions.begin() + 1, fwd.positions.end());
  LevelLoss loss = loss_l2_levels(predicted, targets);
  std::vector<std::vector<Vec3>> d_positions(1);
  for (auto& g : loss.gradient) d_positions.push_back(g);
  NetworkBundle grad = bundle.zeros_like();
  backward_pipeline(hierarchy, bundle, tape, d_positions, grad);

  GradCheckReport report;
  report.loss = loss.value;
  report.parameters = bundle.num_parameters();
  NetworkBundle probe = bundle;
  MLPParams* probe_modules[3] = {&probe.init, &probe.vertex, &probe.edge};
  const MLPParams* grad_modules[3] = {&grad.init, &grad.vertex, &grad.edge};
  for (int m = 0; m < 3; ++m) {
    auto pb = probe_modules[m]->blocks();
    auto gb = grad_modules[m]->blocks();
    for (int b = 0; b < 6; ++b) {
      for (size_t i = 0; i < pb[b].size(); ++i) {
        const double original = pb[b][i];
        bool kink = false;
        pb[b][i] = original + options.step;
        const double plus = loss_of(hierarchy, mesh, probe, targets, tape, kink);
        pb[b][i] = original - options.step;
        const double minus = loss_of(hierarchy, mesh, probe, targets, tape, kink);
        pb[b][i] = original;
        const double numeric = (plus - minus) / (2.0 * options.step);
        const double analytic = gb[b][i];
        const double abs_err = std::abs(analytic - numeric);
        const double denom =
            std::max({std::abs(analytic), std::abs(numeric), options.relative_floor});
        const double rel = abs_err / denom;
        report.max_gradient = std::max(report.max_gradient, std::abs(analytic));
        report.max_relative_error_all = std::max(report.max_relative_error_all, rel);
        if (kink) {
          ++report.kink_parameters;
          continue;
        }
        report.max_absolute_error = std::max(report.max_absolute_error, abs_err);
        if (rel > report.max_relative_error || report.worst_parameter.empty()) {
          report.max_relative_error = rel;
          report.worst_parameter = parameter_name(m, b, i, *probe_modules[m]);
          report.worst_analytic = analytic;
          report.worst_numeric = numeric;
        }
      }
    }
  }
  return report;
}

}  // namespace nsub
