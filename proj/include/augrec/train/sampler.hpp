#pragma once

#include <span>
#include <vector>

#include "augrec/core.hpp"

namespace augrec {

// Train edges with per-user membership lookup.
class TrainingSet {
 public:
  TrainingSet(std::vector<Edge> train_edges, int num_users, int num_items);

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& items_of(int user) const { return user_items_[static_cast<std::size_t>(user)]; }
  bool interacted(int user, int item) const;
  int num_users() const { return static_cast<int>(user_items_.size()); }
  int num_items() const { return num_items_; }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> user_items_;
  int num_items_;
};

struct BatchSample {
  std::vector<Triplet> triplets;  // original triplets first, then augmented ones
  std::size_t num_original = 0;

  std::size_t num_augmented() const { return triplets.size() - num_original; }
};

// B original triplets: (u, i+) uniform over train edges, i- uniform over the items u
// has not interacted with. Then floor(omega3 * B) triplets from `augmented`, without
// replacement when enough are available and with replacement otherwise.
BatchSample sample_batch(const TrainingSet& train, std::span<const Triplet> augmented, int batch_size,
                         double aug_sample_rate, Rng& rng);

}  // namespace augrec
