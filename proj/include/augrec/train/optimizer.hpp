#pragma once

#include "augrec/model/model_state.hpp"

namespace augrec {

struct AdamWSettings {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled: theta -= lr * wd * theta
};

// Adaptive-moment optimizer with decoupled weight decay. Moments mirror the
// parameter layout of the state it was constructed for.
class AdamW {
 public:
  AdamW(const ModelState& like, AdamWSettings settings);

  void step(ModelState& state, const ModelState& grad);
  long steps() const { return t_; }

 private:
  AdamWSettings settings_;
  ModelState m_;
  ModelState v_;
  long t_ = 0;
};

}  // namespace augrec
