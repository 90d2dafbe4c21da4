#pragma once

#include <cstdint>
#include <vector>

#include "augrec/data/feature_bank.hpp"
#include "augrec/data/interaction_graph.hpp"

namespace augrec {

// Planted-factor dataset: each item has a primary genre (its dominant latent
// factor), users prefer one or two genres, side features are noisy linear
// projections of the item factors.
struct SyntheticConfig {
  int num_users = 200;
  int num_items = 300;
  int num_factors = 10;
  double density = 0.02;
  int textual_dim = 64;
  int visual_dim = 32;
  double feature_noise = 1.0;      // stddev of additive feature noise
  double click_noise = 0.1;        // fraction of interactions replaced by uniform random items
  double genre_strength = 1.5;     // weight of the primary genre in factor vectors
  double preference_temperature = 0.5;

  void validate() const;
};

struct SyntheticDataset {
  InteractionGraph graph;
  FeatureBank features;  // textual + visual
  std::vector<ItemMetadata> items;
  Matrix user_factors;
  Matrix item_factors;
  std::vector<int> item_genre;
};

const std::vector<std::string>& genre_names();

SyntheticDataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed);

}  // namespace augrec
