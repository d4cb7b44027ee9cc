#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "nsub/geometry.hpp"
#include "nsub/mlp.hpp"

namespace nsub {

inline constexpr int kFeatureDim = 32;  ///< 3 displacement-like components + latent
inline constexpr int kLatentDim = 29;
inline constexpr int kHiddenDim = 32;
inline constexpr int kInitInputDim = 3 * 3 + 4 * 3;             ///< 21
inline constexpr int kStepInputDim = 3 * 3 + 4 * kFeatureDim;  ///< 137

/// The three learnable modules (initialization, vertex step, edge step),
/// shared across all subdivision levels, plus the metadata a checkpoint
/// carries.
struct NetworkBundle {
  MLPParams init;
  MLPParams vertex;
  MLPParams edge;
  int trained_levels = 2;
  /// Maps the training source's coordinates into the normalized frame the
  /// network was trained in.
  Similarity normalization;

  static NetworkBundle zeros();
  static NetworkBundle random(std::uint64_t seed);

  int num_parameters() const;
  bool all_finite() const;
  NetworkBundle zeros_like() const;
  void set_zero();
};

/// `NSD 1` text checkpoint: module dimensions, trained level count,
/// normalization, then every matrix row-major with round-trip decimals.
std::string format_checkpoint(const NetworkBundle& bundle);
NetworkBundle parse_checkpoint(const std::string& text);
void save_checkpoint(const NetworkBundle& bundle, const std::filesystem::path& path);
NetworkBundle load_checkpoint(const std::filesystem::path& path);

}  // namespace nsub
