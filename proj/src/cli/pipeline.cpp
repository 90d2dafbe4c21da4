#include "augrec/cli/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <fstream>

#include "augrec/augment/mock_language_model.hpp"
#include "augrec/augment/remote_language_model.hpp"
#include "augrec/data/synthetic.hpp"

namespace augrec {

namespace {

std::optional<std::filesystem::path> feature_file(const std::filesystem::path& dir, const std::string& stem) {
  for (const char* ext : {".f32", ".jsonl"}) {
    const auto p = dir / (stem + ext);
    if (std::filesystem::exists(p)) return p;
  }
  return std::nullopt;
}

}  // namespace

LoadedDataset load_dataset(const RunConfig& config) {
  LoadedDataset data;
  if (config.dataset.name == "synthetic") {
    SyntheticDataset syn = generate_synthetic(config.dataset.synthetic, derive_seed(config.seed, "synthetic"));
    data.graph = std::move(syn.graph);
    data.items = std::move(syn.items);
    data.features = std::move(syn.features);
    data.item_knowledge = std::move(syn.item_factors);
  } else {
    const auto& dir = config.dataset.data_dir;
    data.graph = load_interactions(dir / "interactions.tsv");
    const auto meta = dir / "items.tsv";
    if (std::filesystem::exists(meta)) {
      data.items = load_item_metadata(meta, data.graph);
    } else {
      data.items.resize(static_cast<std::size_t>(data.graph.num_items));
      for (int i = 0; i < data.graph.num_items; ++i) data.items[static_cast<std::size_t>(i)].title = data.graph.items.raw(i);
      spdlog::warn("{} not found; prompts will describe items by raw id only", meta.string());
    }
    std::map<Modality, std::filesystem::path> paths;
    if (auto p = feature_file(dir, "textual")) paths[Modality::textual] = *p;
    if (auto p = feature_file(dir, "visual")) paths[Modality::visual] = *p;
    data.features = load_feature_bank(paths, {{Modality::textual, kTextualDim}, {Modality::visual, kVisualDim}},
                                      data.graph.num_users, data.graph.num_items);
  }
  data.split = split_dataset(data.graph, config.dataset.ratios, derive_seed(config.seed, "split"));
  data.history = items_by_user(data.split.train, data.graph.num_users);
  return data;
}

Matrix train_base_scorer(const RunConfig& config, const LoadedDataset& data) {
  HyperParams hp = config.model;
  hp.num_layers = 0;
  TrainConfig tc = config.train;
  tc.epochs = config.base_epochs;
  tc.aug_sample_rate = 0.0;
  tc.prune_rate = 0.0;
  tc.fr_weight = 0.0;
  tc.incorporation_scale = 0.0;
  tc.patience = 0;
  tc.eval_every = config.base_epochs;
  tc.seed = derive_seed(config.seed, "base_scorer");
  const FeatureBank none;
  FitInputs in{data.graph.num_users, data.graph.num_items, &data.split, &none, {}};
  const FitResult fitted = fit(hp, tc, in);
  const Matrix h = representations(fitted.state, none, data.split, 0.0);
  const int nu = data.graph.num_users;
  return h.topRows(nu) * h.bottomRows(data.graph.num_items).transpose();
}

std::unique_ptr<LanguageModel> make_language_model(const RunConfig& config, const LoadedDataset& data) {
  if (!config.mock_llm) {
    RemoteModelSettings remote = config.remote;
    remote.timeout_seconds = config.augment.request_timeout;
    return std::make_unique<RemoteLanguageModel>(remote);
  }
  // On synthetic data the mock acts as an oracle that knows the planted factors.
  Matrix item_features;
  if (data.item_knowledge.size() > 0) {
    item_features = data.item_knowledge;
  } else if (data.features.has(Modality::textual)) {
    item_features = data.features.at(Modality::textual);
  } else if (data.features.has(Modality::visual)) {
    item_features = data.features.at(Modality::visual);
  } else {
    throw ConfigError("the mock language model needs textual or visual item features");
  }
  return std::make_unique<MockLanguageModel>(data.prompt_context(), std::move(item_features),
                                             derive_seed(config.seed, "mock"), config.augment.embedding_dim);
}

AugmentationOutputs run_augmentation(const RunConfig& config, const LoadedDataset& data, LanguageModel& model,
                                     AugmentationCache& cache) {
  AugmentationOutputs out;
  const Matrix scores = train_base_scorer(config, data);
  out.pool = build_candidate_pool(scores, data.split, config.cand_size, "bpr-mf");
  Augmentor augmentor(model, cache, config.augment);
  const PromptContext context = data.prompt_context();
  out.edges = augmentor.run_edge_augmentation(out.pool, context, config.edge_target,
                                              derive_seed(config.seed, "edge_users"));
  out.side = augmentor.run_side_augmentation(context, data.graph.num_users, data.graph.num_items);
  out.stats = augmentor.stats();
  return out;
}

void write_augmentation(const std::filesystem::path& dir, const AugmentationOutputs& out, const InteractionGraph& graph) {
  std::filesystem::create_directories(dir);
  write_triplets(dir / kTripletsFile, out.edges, graph);
  write_feature_file(dir / kAugUserFile, out.side.user_features);
  write_feature_file(dir / kAugItemFile, out.side.item_features);
}

AugmentationInputs read_augmentation(const RunConfig& config, const InteractionGraph& graph) {
  AugmentationInputs in;
  const auto dir = config.resolved_augment_dir();
  auto need = [&](const char* name) {
    const auto p = dir / name;
    if (!std::filesystem::exists(p)) {
      throw MissingInputError("missing augmentation output " + p.string() + " (run `augment` first)");
    }
    return p;
  };
  if (config.use_aug_edges && config.train.aug_sample_rate > 0) in.edges = read_triplets(need(kTripletsFile), graph);
  if (config.use_aug_user) in.user_features = read_feature_file(need(kAugUserFile));
  if (config.use_aug_item) in.item_features = read_feature_file(need(kAugItemFile));
  return in;
}

FeatureBank training_bank(const RunConfig& config, const LoadedDataset& data, const AugmentationInputs& aug) {
  FeatureBank bank = data.features;
  if (config.use_aug_user && aug.user_features) bank.set(Modality::aug_user, *aug.user_features);
  if (config.use_aug_item && aug.item_features) bank.set(Modality::aug_item, *aug.item_features);
  bank.validate(data.graph.num_users, data.graph.num_items);
  return bank;
}

TrainOutcome train_and_test(const RunConfig& config, const LoadedDataset& data, const AugmentationInputs& aug,
                            const FitOptions& options) {
  TrainOutcome out;
  out.bank = training_bank(config, data, aug);
  TrainConfig tc = config.train;
  tc.seed = config.seed;
  const std::span<const Triplet> edges =
      config.use_aug_edges ? std::span<const Triplet>(aug.edges.triplets) : std::span<const Triplet>();
  FitInputs in{data.graph.num_users, data.graph.num_items, &data.split, &out.bank, edges};
  out.fit = fit(config.model, tc, in, options);
  const Matrix h = representations(out.fit.state, out.bank, data.split, tc.incorporation_scale);
  EvalOptions eval;
  eval.target = EvalTarget::test;
  eval.ks = config.eval_ks;
  eval.threads = config.eval_threads;
  out.test = evaluate_all_ranking(h, data.graph.num_users, data.split, eval);
  return out;
}

std::vector<std::pair<std::string, RunConfig>> ablation_variants(const RunConfig& base) {
  std::vector<std::pair<std::string, RunConfig>> rows;
  rows.emplace_back("full", base);
  RunConfig c = base;
  c.train.aug_sample_rate = 0.0;
  rows.emplace_back("w/o-u-i", c);
  c = base;
  c.use_aug_user = false;
  rows.emplace_back("w/o-u", c);
  c = base;
  c.use_aug_user = false;
  c.use_aug_item = false;
  rows.emplace_back("w/o-u&i", c);
  c = base;
  c.train.prune_rate = 0.0;
  rows.emplace_back("w/o-prune", c);
  c = base;
  c.train.prune_rate = 0.0;
  c.train.fr_weight = 0.0;
  rows.emplace_back("w/o-QC", c);
  return rows;
}

}  // namespace augrec

namespace augrec {

const AblationCell& AblationResult::at(const std::string& variant, std::uint64_t seed) const {
  for (const auto& c : cells) {
    if (c.variant == variant && c.seed == seed) return c;
  }
  throw Error("no ablation cell for " + variant + " at seed " + std::to_string(seed));
}

AblationResult run_ablation(const RunConfig& base, const std::filesystem::path& work_dir) {
  AblationResult result;
  for (const auto& [name, cfg] : ablation_variants(base)) result.variants.push_back(name);
  for (int s = 0; s < base.ablate_seeds; ++s) {
    RunConfig seeded = base;
    seeded.seed = base.seed + static_cast<std::uint64_t>(s);
    seeded.augment_dir = work_dir / ("seed_" + std::to_string(seeded.seed));
    seeded.augment.cache_path = seeded.augment_dir / "cache.jsonl";
    result.seeds.push_back(seeded.seed);

    const LoadedDataset data = load_dataset(seeded);
    {
      auto model = make_language_model(seeded, data);
      AugmentationCache cache(seeded.augment.cache_path);
      write_augmentation(seeded.augment_dir, run_augmentation(seeded, data, *model, cache), data.graph);
    }
    for (auto [name, cfg] : ablation_variants(seeded)) {
      const AugmentationInputs aug = read_augmentation(cfg, data.graph);
      const TrainOutcome outcome = train_and_test(cfg, data, aug);
      spdlog::info("seed {} {}: best val recall {:.4f} at epoch {}", seeded.seed, name, outcome.fit.best_val_recall,
                   outcome.fit.best_epoch);
      result.cells.push_back({name, seeded.seed, outcome.test, outcome.fit.best_epoch, outcome.fit.best_val_recall});
    }
  }
  return result;
}

}  // namespace augrec
