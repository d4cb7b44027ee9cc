#include "nsub/loss.hpp"

#include "nsub/error.hpp"

namespace nsub {

LevelLoss loss_l2_levels(const std::vector<std::vector<Vec3>>& predicted,
                         const std::vector<std::vector<Vec3>>& targets) {
  if (predicted.size() != targets.size() || predicted.empty()) {
    throw DimensionError("predicted and target level counts differ");
  }
  const double levels = static_cast<double>(predicted.size());
  LevelLoss out;
  out.gradient.resize(predicted.size());
  for (size_t l = 0; l < predicted.size(); ++l) {
    const auto& p = predicted[l];
    const auto& t = targets[l];
    if (p.size() != t.size() || p.empty()) {
      throw DimensionError("level " + std::to_string(l + 1) + " has " + std::to_string(p.size()) +
                           " predictions but " + std::to_string(t.size()) + " targets");
    }
    const double n = static_cast<double>(p.size());
    double sum = 0.0;
    auto& g = out.gradient[l];
    g.resize(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
      Vec3 d = p[i] - t[i];
      sum += d.squaredNorm();
      g[i] = d * (2.0 / (n * levels));
    }
    out.per_level.push_back(sum / n);
    out.value += sum / n;
  }
  out.value /= levels;
  return out;
}

}  // namespace nsub
