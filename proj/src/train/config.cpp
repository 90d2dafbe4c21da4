#include "augrec/train/config.hpp"

#include "augrec/core.hpp"

namespace augrec {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (lr < 0) throw ConfigError("train.lr must be >= 0");
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (weight_decay < 0) throw ConfigError("train.weight_decay (omega2) must be >= 0");
  if (aug_sample_rate < 0) throw ConfigError("train.aug_sample_rate (omega3) must be >= 0");
  if (prune_rate < 0 || prune_rate >= 1) throw ConfigError("train.prune_rate (omega4) must be in [0, 1)");
  if (incorporation_scale < 0) throw ConfigError("train.incorporation_scale (omega1) must be >= 0");
  if (fr_gamma < 1) throw ConfigError("train.fr_gamma must be >= 1");
  if (fr_weight < 0) throw ConfigError("train.fr_weight must be >= 0");
  if (mask_rate <= 0 || mask_rate >= 1) throw ConfigError("train.mask_rate must be in (0, 1)");
  if (patience < 0) throw ConfigError("train.patience must be >= 0");
  if (eval_k < 1) throw ConfigError("train.eval_k must be >= 1");
  if (eval_every < 1) throw ConfigError("train.eval_every must be >= 1");
  if (adam_beta1 < 0 || adam_beta1 >= 1 || adam_beta2 < 0 || adam_beta2 >= 1) {
    throw ConfigError("train.adam betas must be in [0, 1)");
  }
  if (adam_eps <= 0) throw ConfigError("train.adam_eps must be > 0");
}

}  // namespace augrec
