#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "nsub/adam.hpp"
#include "nsub/dataset.hpp"
#include "nsub/network.hpp"
#include "nsub/pipeline.hpp"

namespace nsub {

struct TrainOptions {
  int epochs = 700;
  double learning_rate = 0.002;
  std::uint64_t seed = 0;
  int levels = 0;  ///< 0: use the dataset's level count
  std::filesystem::path checkpoint;  ///< written at the end (and periodically) when set
  int checkpoint_every = 0;          ///< epochs between periodic checkpoints; 0 disables
  /// Called after every epoch with its mean pair loss.
  std::function<void(int epoch, double loss)> on_epoch;
};

struct TrainResult {
  NetworkBundle bundle;
  std::vector<double> history;  ///< mean pair loss per epoch
  bool aborted = false;         ///< a non-finite loss stopped training
  std::string message;
  int rejected_steps = 0;       ///< updates skipped for non-finite gradients
};

/// Loss and parameter gradient of one pair under `bundle`.
struct PairEvaluation {
  double loss = 0.0;
  std::vector<double> per_level;
  NetworkBundle grad;
};

/// Precomputed connectivity and targets of one pair.
struct PreparedPair {
  SubdivisionHierarchy hierarchy;
  const TrainingPair* pair = nullptr;
  int levels = 0;
};

PreparedPair prepare_pair(const TrainingPair& pair, int levels);
PairEvaluation evaluate_pair(const PreparedPair& pair, const NetworkBundle& bundle);

/// Per-pair ADAM updates over seeded shuffles of the dataset. Starts from
/// `initial` when given, otherwise from NetworkBundle::random(seed).
TrainResult train(const Dataset& dataset, const TrainOptions& options,
                  const NetworkBundle* initial = nullptr);

}  // namespace nsub
