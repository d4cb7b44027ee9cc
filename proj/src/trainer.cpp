#include "nsub/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nsub/error.hpp"
#include "nsub/loss.hpp"

namespace nsub {

PreparedPair prepare_pair(const TrainingPair& pair, int levels) {
  if (levels < 1 || levels > pair.levels()) {
    throw DimensionError("pair has " + std::to_string(pair.levels()) + " target levels, " +
                         std::to_string(levels) + " requested");
  }
  return PreparedPair{SubdivisionHierarchy(pair.coarse.shared_topology(), levels), &pair, levels};
}

PairEvaluation evaluate_pair(const PreparedPair& prepared, const NetworkBundle& bundle) {
  ForwardTape tape;
  ForwardOutput fwd =
      forward_pipeline(prepared.hierarchy, prepared.pair->coarse.vertices(), bundle, &tape);
  std::vector<std::vector<Vec3>> predicted(fwd.positions.begin() + 1, fwd.positions.end());
  std::vector<std::vector<Vec3>> targets(prepared.pair->targets.begin(),
                                         prepared.pair->targets.begin() + prepared.levels);
  LevelLoss loss = loss_l2_levels(predicted, targets);
  PairEvaluation out;
  out.loss = loss.value;
  out.per_level = loss.per_level;
  out.grad = bundle.zeros_like();
  if (!std::isfinite(loss.value)) return out;
  std::vector<std::vector<Vec3>> d_positions(1);
  for (auto& g : loss.gradient) d_positions.push_back(std::move(g));
  backward_pipeline(prepared.hierarchy, bundle, tape, d_positions, out.grad);
  return out;
}

TrainResult train(const Dataset& dataset, const TrainOptions& options, const NetworkBundle* initial) {
  if (dataset.pairs.empty()) throw DimensionError("empty dataset");
  if (options.epochs < 0) throw DimensionError("epochs must be nonnegative");
  const int levels = options.levels > 0 ? options.levels : dataset.options.levels;

  TrainResult out;
  out.bundle = initial ? *initial : NetworkBundle::random(options.seed);
  out.bundle.trained_levels = levels;
  out.bundle.normalization = dataset.normalization;

  std::vector<PreparedPair> prepared;
  prepared.reserve(dataset.pairs.size());
  for (const TrainingPair& p : dataset.pairs) prepared.push_back(prepare_pair(p, levels));

  AdamOptions adam;
  adam.learning_rate = options.learning_rate;
  AdamState state = AdamState::for_bundle(out.bundle, adam);
  std::mt19937_64 rng(options.seed ^ 0x5eedf00dULL);
  std::vector<int> order(prepared.size());
  std::iota(order.begin(), order.end(), 0);

  NetworkBundle last_good = out.bundle;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    for (int idx : order) {
      PairEvaluation eval = evaluate_pair(prepared[idx], out.bundle);
      if (!std::isfinite(eval.loss)) {
        out.aborted = true;
        out.bundle = last_good;
        out.message = "non-finite loss at epoch " + std::to_string(epoch) + ", pair " +
                      std::to_string(idx) + "; keeping the last good parameters";
        break;
      }
      sum += eval.loss;
      last_good = out.bundle;
      if (!adam_step(state, out.bundle, eval.grad)) ++out.rejected_steps;
    }
    if (out.aborted) break;
    const double mean = sum / static_cast<double>(order.size());
    out.history.push_back(mean);
    if (options.on_epoch) options.on_epoch(epoch, mean);
    if (!options.checkpoint.empty() && options.checkpoint_every > 0 &&
        (epoch + 1) % options.checkpoint_every == 0) {
      save_checkpoint(out.bundle, options.checkpoint);
    }
  }
  if (!options.checkpoint.empty()) save_checkpoint(out.bundle, options.checkpoint);
  return out;
}

}  // namespace nsub
