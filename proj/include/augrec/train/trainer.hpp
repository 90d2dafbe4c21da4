#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "augrec/data/feature_bank.hpp"
#include "augrec/data/split.hpp"
#include "augrec/eval/metrics.hpp"
#include "augrec/model/model_state.hpp"
#include "augrec/train/config.hpp"

namespace augrec {

struct EpochLog {
  int epoch = 0;                       // 1-based
  double bpr_loss = 0.0;               // mean kept-triplet data loss per step
  double fr_loss = 0.0;                // mean restoration loss per step
  std::size_t pruned_count = 0;        // triplets discarded over the epoch
  std::optional<TopKMetrics> val;      // at TrainConfig::eval_k, when evaluated
  double wall_time = 0.0;              // seconds since fit started
};

// `include_wall_time` off gives a record that is reproducible bit for bit.
nlohmann::json to_json(const EpochLog& log, int eval_k, bool include_wall_time = true);

struct FitResult {
  ModelState state;       // best validation state (last state when nothing was evaluated)
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_recall = 0.0;
  bool early_stopped = false;
};

struct FitInputs {
  int num_users = 0;
  int num_items = 0;
  const DatasetSplit* split = nullptr;
  const FeatureBank* bank = nullptr;           // original and augmented features; may be empty
  std::span<const Triplet> augmented;          // E_A
};

struct FitOptions {
  std::filesystem::path log_path;              // JSON-lines epoch log; empty disables
  std::filesystem::path diagnostics_path;      // written when training diverges; empty disables
  int eval_threads = 1;
  std::function<void(const EpochLog&)> on_epoch;
};

// Thrown when the loss or a parameter becomes non-finite.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

FitResult fit(const HyperParams& hp, const TrainConfig& config, const FitInputs& inputs,
              const FitOptions& options = {});

// Final representations in evaluation mode (no dropout).
Matrix representations(const ModelState& state, const FeatureBank& bank, const DatasetSplit& split,
                       double omega1);

}  // namespace augrec
