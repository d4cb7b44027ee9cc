#pragma once

#include <vector>

#include "nsub/mesh.hpp"

namespace nsub {

struct LevelLoss {
  double value = 0.0;
  std::vector<double> per_level;
  /// d value / d predicted, shaped like the predictions.
  std::vector<std::vector<Vec3>> gradient;
};

/// Mean over levels of the mean squared distance between predicted and
/// target vertices. Entry l of each argument is one subdivision level.
/// Throws DimensionError on a shape mismatch.
LevelLoss loss_l2_levels(const std::vector<std::vector<Vec3>>& predicted,
                         const std::vector<std::vector<Vec3>>& targets);

}  // namespace nsub
