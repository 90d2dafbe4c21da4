#pragma once

#include <cstdint>

namespace augrec {

struct TrainConfig {
  int batch_size = 1024;           // B
  double lr = 1e-3;
  int epochs = 200;
  double weight_decay = 1e-4;      // omega2, decoupled in the optimizer
  double aug_sample_rate = 0.2;    // omega3: floor(omega3 * B) augmented triplets per batch
  double prune_rate = 0.2;         // omega4: largest-loss fraction dropped per batch
  double incorporation_scale = 0.8;  // omega1
  double fr_gamma = 2.0;           // gamma of the scaled cosine error
  double fr_weight = 0.01;         // weight of the restoration loss in the total
  double mask_rate = 0.1;          // fraction of feature-bearing nodes masked per epoch
  int patience = 20;               // epochs without val Recall@eval_k improvement; 0 disables
  int eval_k = 20;
  int eval_every = 1;
  std::uint64_t seed = 2024;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

}  // namespace augrec
