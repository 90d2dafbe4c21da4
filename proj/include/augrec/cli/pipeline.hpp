#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "augrec/augment/augmentor.hpp"
#include "augrec/augment/candidate_pool.hpp"
#include "augrec/augment/language_model.hpp"
#include "augrec/cli/run_config.hpp"
#include "augrec/data/feature_bank.hpp"
#include "augrec/data/split.hpp"
#include "augrec/eval/evaluator.hpp"
#include "augrec/train/trainer.hpp"

namespace augrec {

struct LoadedDataset {
  InteractionGraph graph;
  std::vector<ItemMetadata> items;
  FeatureBank features;  // original modalities only
  DatasetSplit split;
  std::vector<std::vector<int>> history;  // train items per user
  Matrix item_knowledge;  // planted item factors of synthetic data; empty otherwise

  PromptContext prompt_context() const { return {&items, &history}; }
};

// Synthetic data is generated in memory; real datasets are read from
// dataset.data_dir (interactions.tsv, optional items.tsv and textual/visual
// feature files).
LoadedDataset load_dataset(const RunConfig& config);

// Plain BPR-MF scores used to pick hard candidates.
Matrix train_base_scorer(const RunConfig& config, const LoadedDataset& data);

struct AugmentationOutputs {
  CandidatePool pool;
  AugmentedTripletSet edges;
  SideAugmentation side;
  AugmentationStats stats;
};

// Mock or remote model according to the config.
std::unique_ptr<LanguageModel> make_language_model(const RunConfig& config, const LoadedDataset& data);

AugmentationOutputs run_augmentation(const RunConfig& config, const LoadedDataset& data, LanguageModel& model,
                                     AugmentationCache& cache);

// File names inside the augmentation directory.
inline constexpr const char* kTripletsFile = "aug_triplets.tsv";
inline constexpr const char* kAugUserFile = "aug_user.f32";
inline constexpr const char* kAugItemFile = "aug_item.f32";

void write_augmentation(const std::filesystem::path& dir, const AugmentationOutputs& out, const InteractionGraph& graph);

struct AugmentationInputs {
  AugmentedTripletSet edges;
  std::optional<Matrix> user_features;
  std::optional<Matrix> item_features;
};

// Reads what the config asks for; MissingInputError when a needed file is absent.
AugmentationInputs read_augmentation(const RunConfig& config, const InteractionGraph& graph);

// Original features plus the augmented ones enabled in the config.
FeatureBank training_bank(const RunConfig& config, const LoadedDataset& data, const AugmentationInputs& aug);

struct TrainOutcome {
  FitResult fit;
  FeatureBank bank;
  EvalReport test;
};

TrainOutcome train_and_test(const RunConfig& config, const LoadedDataset& data, const AugmentationInputs& aug,
                            const FitOptions& options = {});

// Rows of the ablation table: full, w/o-u-i, w/o-u, w/o-u&i, w/o-prune, w/o-QC.
std::vector<std::pair<std::string, RunConfig>> ablation_variants(const RunConfig& base);

}  // namespace augrec

namespace augrec {

struct AblationCell {
  std::string variant;
  std::uint64_t seed = 0;
  EvalReport test;
  int best_epoch = 0;
  double best_val_recall = 0.0;
};

struct AblationResult {
  std::vector<std::string> variants;
  std::vector<std::uint64_t> seeds;
  std::vector<AblationCell> cells;  // seed-major, variants in table order

  const AblationCell& at(const std::string& variant, std::uint64_t seed) const;
};

// For each seed (base.seed, base.seed + 1, ...): regenerate or reload the data,
// augment into work_dir/seed_<n> (cached), then train and test every variant.
AblationResult run_ablation(const RunConfig& base, const std::filesystem::path& work_dir);

}  // namespace augrec
