#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nsub/geometry.hpp"
#include "nsub/mesh.hpp"

namespace nsub {

enum class TargetKind {
  SurfaceMap,  ///< images of the refinement points under the decimation map
  Loop,        ///< classic Loop subdivision of the coarse mesh
};

/// A coarse mesh with one target position per vertex of every refinement level.
struct TrainingPair {
  Mesh coarse;
  /// targets[l] holds the level-(l + 1) targets.
  std::vector<std::vector<Vec3>> targets;
  /// Fine-mesh pre-image of every surface-map target (empty otherwise).
  std::vector<std::vector<BarycentricPoint>> preimages;
  std::uint64_t source_hash = 0;
  std::uint64_t seed = 0;
  int source_index = 0;
  bool best_effort = false;  ///< decimation stopped above the requested count

  int levels() const { return static_cast<int>(targets.size()); }
};

struct DatasetOptions {
  int count = 200;
  int min_vertices = 150;
  int max_vertices = 300;
  int levels = 2;
  std::uint64_t seed = 0;
  TargetKind targets = TargetKind::SurfaceMap;
  int max_attempts = 5;  ///< per pair, before keeping a best-effort result
};

struct Dataset {
  DatasetOptions options;
  std::vector<TrainingPair> pairs;
  std::vector<std::uint64_t> source_hashes;  ///< of the normalized sources
  /// Normalization of the (single) source; identity for multi-shape sets.
  Similarity normalization;
  int dropped_pairs = 0;  ///< regenerated after a failed map evaluation
};

/// For every vertex of each refinement level (1..levels) of `coarse`, the
/// point on a coarse face it subdivides: entry [l][v] is for level l + 1.
std::vector<std::vector<BarycentricPoint>> refinement_points(const Topology& coarse, int levels);

/// Decimates each source (normalized with normalize_unit_box) `count` times
/// with the random-100 policy, splitting the count evenly across sources.
Dataset generate_dataset(const std::vector<Mesh>& sources, const DatasetOptions& options);
inline Dataset generate_dataset(const Mesh& source, const DatasetOptions& options) {
  return generate_dataset(std::vector<Mesh>{source}, options);
}

/// Writes `manifest.txt` plus `pair_%04d/coarse.obj` and
/// `pair_%04d/targets_L%d.txt` under `dir` (created if missing).
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
/// Reads a dataset written by save_dataset (pre-images are not stored).
Dataset load_dataset(const std::filesystem::path& dir);

const char* to_string(TargetKind kind);

}  // namespace nsub
