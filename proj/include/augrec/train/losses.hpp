#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "augrec/core.hpp"

namespace augrec {

// Per-triplet BPR loss -log sigma(pos - neg).
inline double triplet_loss(double pos_score, double neg_score) { return softplus(neg_score - pos_score); }

struct BprGradients {
  double positive;  // d loss / d pos_score = sigma(pos - neg) - 1, always < 0
  double negative;  // d loss / d neg_score = 1 - sigma(pos - neg), always > 0
};

BprGradients bpr_gradients(double pos_score, double neg_score);

// N = floor((1 - prune_rate) * batch_size); throws ConfigError when N would be 0.
std::size_t retained_count(std::size_t batch_size, double prune_rate);

// Indices of the n smallest losses, ordered by ascending loss (ties by index).
std::vector<std::size_t> keep_smallest(std::span<const double> losses, std::size_t n);

struct PrunedBprLoss {
  std::vector<double> per_triplet;
  std::vector<std::size_t> kept;
  double data_loss = 0.0;        // sum of kept per-triplet losses
  double regularization = 0.0;   // weight_decay * ||Theta||^2
  double total() const { return data_loss + regularization; }
};

// Scores come from inner products of the final representations `h`
// (users in rows [0, num_users), items after).
PrunedBprLoss pruned_bpr_loss(std::span<const Triplet> batch, const Matrix& h, int num_users,
                              double prune_rate, double weight_decay, double squared_param_norm);

// Nodes whose augmented features are replaced by the mask token for one epoch.
struct MaskSelection {
  std::vector<int> nodes;  // sorted node indices (users, then num_users + item)
  std::uint64_t seed = 0;
};

// floor(mask_rate * |eligible|) nodes drawn uniformly without replacement.
MaskSelection select_masked_nodes(std::span<const int> eligible, double mask_rate, std::uint64_t seed);

// (1 - cos(restored, original))^gamma; a zero-norm operand gives cos = 0.
double scaled_cosine_error(const RowVector& restored, const RowVector& original, double gamma);

}  // namespace augrec
