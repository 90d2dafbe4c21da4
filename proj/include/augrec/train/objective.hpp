#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "augrec/data/adjacency.hpp"
#include "augrec/data/feature_bank.hpp"
#include "augrec/model/encoder.hpp"
#include "augrec/model/model_state.hpp"
#include "augrec/train/config.hpp"
#include "augrec/train/losses.hpp"

namespace augrec {

struct ObjectiveSettings {
  double omega1 = 0.0;
  double weight_decay = 0.0;
  double prune_rate = 0.0;
  double fr_gamma = 2.0;
  double fr_weight = 0.0;
  bool training = false;           // enables projection dropout
  std::uint64_t dropout_seed = 0;

  static ObjectiveSettings from(const TrainConfig& config);
};

struct ObjectiveValue {
  double bpr_data = 0.0;        // sum of kept per-triplet losses
  double regularization = 0.0;  // weight_decay * ||Theta||^2
  double fr = 0.0;              // restoration loss (unweighted)
  double total = 0.0;           // bpr_data + regularization + fr_weight * fr
  std::size_t kept = 0;
  std::size_t pruned = 0;
  std::vector<std::size_t> kept_indices;
};

// Nodes that carry augmented features and can therefore be masked.
std::vector<int> maskable_nodes(const ModelState& state, const FeatureBank& bank);

// Feature restoration loss for a fixed mask: masked rows of each augmented
// matrix are replaced by the mask token, projected, propagated over the graph,
// decoded back to the augmented width and compared with the originals through
// the scaled cosine error, averaged over the masked nodes. When `grad` is given,
// adds `weight` times its gradient.
double restoration_loss(const ModelState& state, const FeatureBank& bank, const NormalizedAdjacency& adj,
                        const MaskSelection& mask, double gamma, ModelState* grad = nullptr, double weight = 1.0);

struct RestorationResult {
  double loss = 0.0;
  MaskSelection selection;
};

// Draws the mask from `rng` and evaluates the restoration loss.
RestorationResult mask_and_restore_loss(const ModelState& state, const FeatureBank& bank,
                                        const NormalizedAdjacency& adj, double mask_rate, double gamma, Rng& rng);

// Total training objective on one batch. If `grad` is non-null it receives the
// gradient (overwritten). The weight-decay term always contributes to the value;
// it contributes to the gradient only when `l2_in_gradient` is set (the optimizer
// applies it decoupled instead).
ObjectiveValue evaluate_objective(const ModelState& state, const FeatureBank& bank, const NormalizedAdjacency& adj,
                                  std::span<const Triplet> batch, const MaskSelection* mask,
                                  const ObjectiveSettings& settings, ModelState* grad, bool l2_in_gradient);

}  // namespace augrec
