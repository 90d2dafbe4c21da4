#include "augrec/train/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "augrec/data/interaction_graph.hpp"

namespace augrec {

TrainingSet::TrainingSet(std::vector<Edge> train_edges, int num_users, int num_items)
    : edges_(std::move(train_edges)), user_items_(items_by_user(edges_, num_users)), num_items_(num_items) {
  if (edges_.empty()) throw DataError("training set has no edges");
}

bool TrainingSet::interacted(int user, int item) const {
  const auto& items = items_of(user);
  return std::binary_search(items.begin(), items.end(), item);
}

BatchSample sample_batch(const TrainingSet& train, std::span<const Triplet> augmented, int batch_size,
                         double aug_sample_rate, Rng& rng) {
  BatchSample batch;
  const auto num_aug = static_cast<std::size_t>(std::floor(aug_sample_rate * batch_size));
  batch.triplets.reserve(static_cast<std::size_t>(batch_size) + num_aug);

  std::uniform_int_distribution<std::size_t> pick_edge(0, train.edges().size() - 1);
  std::uniform_int_distribution<int> pick_item(0, train.num_items() - 1);
  for (int b = 0; b < batch_size; ++b) {
    const Edge& e = train.edges()[pick_edge(rng)];
    if (static_cast<int>(train.items_of(e.user).size()) >= train.num_items()) {
      throw DataError("user " + std::to_string(e.user) + " interacted with every item; no negatives");
    }
    int neg = pick_item(rng);
    while (train.interacted(e.user, neg)) neg = pick_item(rng);
    batch.triplets.push_back({e.user, e.item, neg});
  }
  batch.num_original = batch.triplets.size();

  if (num_aug == 0 || augmented.empty()) return batch;
  if (augmented.size() >= num_aug) {
    std::sample(augmented.begin(), augmented.end(), std::back_inserter(batch.triplets), num_aug, rng);
  } else {
    std::uniform_int_distribution<std::size_t> pick_aug(0, augmented.size() - 1);
    for (std::size_t k = 0; k < num_aug; ++k) batch.triplets.push_back(augmented[pick_aug(rng)]);
  }
  return batch;
}

}  // namespace augrec
