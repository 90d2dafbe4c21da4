#include "augrec/cli/commands.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "augrec/cli/pipeline.hpp"
#include "augrec/cli/run_config.hpp"
#include "augrec/model/checkpoint.hpp"

namespace augrec {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_snapshot(const RunConfig& config, const std::string& command) {
  std::filesystem::create_directories(config.out_dir);
  write_text(config.out_dir / ("resolved_config." + command + ".ini"), render_config(config));
}

int cmd_augment(const RunConfig& config) {
  const LoadedDataset data = load_dataset(config);
  const auto dir = config.resolved_augment_dir();
  std::filesystem::create_directories(dir);
  const auto cache_path = config.augment.cache_path.empty() ? dir / "cache.jsonl" : config.augment.cache_path;
  auto model = make_language_model(config, data);
  AugmentationCache cache(cache_path);
  const AugmentationOutputs out = run_augmentation(config, data, *model, cache);
  write_augmentation(dir, out, data.graph);

  nlohmann::json summary = to_json(out.stats);
  summary["num_augmented_triplets"] = out.edges.triplets.size();
  summary["candidate_source"] = out.pool.source;
  summary["pool_size"] = out.pool.pool_size;
  summary["model"] = model->name();
  write_text(dir / "augment_stats.json", summary.dump(2) + "\n");
  std::cout << "augmented triplets: " << out.edges.triplets.size() << "\n"
            << "client calls: " << out.stats.client_calls << ", cache hits: " << out.stats.cache_hits
            << ", failures: " << out.stats.failures << "\n"
            << "tokens: " << out.stats.prompt_tokens << " prompt, " << out.stats.completion_tokens << " completion\n";
  return kExitOk;
}

int cmd_train(const RunConfig& config) {
  const LoadedDataset data = load_dataset(config);
  const AugmentationInputs aug = read_augmentation(config, data.graph);
  const FeatureBank bank = training_bank(config, data, aug);
  TrainConfig tc = config.train;
  tc.seed = config.seed;
  const std::span<const Triplet> edges =
      config.use_aug_edges ? std::span<const Triplet>(aug.edges.triplets) : std::span<const Triplet>();
  FitOptions options;
  options.log_path = config.out_dir / "train_log.jsonl";
  options.diagnostics_path = config.out_dir / "diagnostics.json";
  options.eval_threads = config.eval_threads;
  const FitResult result =
      fit(config.model, tc, {data.graph.num_users, data.graph.num_items, &data.split, &bank, edges}, options);

  nlohmann::json meta = {{"dataset", config.dataset.name},
                         {"seed", config.seed},
                         {"config_hash", config_hash(config)},
                         {"incorporation_scale", config.train.incorporation_scale},
                         {"best_epoch", result.best_epoch},
                         {"best_val_recall", result.best_val_recall},
                         {"epochs_run", result.log.size()}};
  save_checkpoint(config.out_dir / "checkpoint.bin", result.state, meta);
  std::cout << "epochs run: " << result.log.size() << (result.early_stopped ? " (early stop)" : "") << "\n"
            << "best epoch: " << result.best_epoch << ", val recall@" << tc.eval_k << ": " << std::fixed
            << std::setprecision(4) << result.best_val_recall << "\n";
  return kExitOk;
}

int cmd_evaluate(RunConfig config) {
  const auto path = config.checkpoint.empty() ? config.out_dir / "checkpoint.bin" : config.checkpoint;
  if (!std::filesystem::exists(path)) throw MissingInputError("checkpoint not found: " + path.string());
  const LoadedCheckpoint ckpt = load_checkpoint(path);
  const LoadedDataset data = load_dataset(config);
  if (ckpt.state.num_users() != data.graph.num_users || ckpt.state.num_items() != data.graph.num_items) {
    throw DataError("checkpoint does not match the dataset's user and item counts");
  }
  config.use_aug_edges = false;
  config.use_aug_user = ckpt.state.projections.count(Modality::aug_user) != 0;
  config.use_aug_item = ckpt.state.projections.count(Modality::aug_item) != 0;
  const AugmentationInputs aug = read_augmentation(config, data.graph);
  const FeatureBank bank = training_bank(config, data, aug);
  const double omega1 = ckpt.metadata.value("incorporation_scale", config.train.incorporation_scale);
  const Matrix h = representations(ckpt.state, bank, data.split, omega1);
  EvalOptions eval;
  eval.ks = config.eval_ks;
  eval.threads = config.eval_threads;
  const EvalReport report = evaluate_all_ranking(h, data.graph.num_users, data.split, eval);

  nlohmann::json j = to_json(report);
  j["config_hash"] = config_hash(config);
  j["checkpoint_hash"] = file_sha256_hex(path.string());
  write_text(config.out_dir / "eval_report.json", j.dump(2) + "\n");
  std::cout << "evaluable users: " << report.num_evaluable_users << "\n";
  for (int k : report.ks) {
    std::cout << std::fixed << std::setprecision(4) << "K=" << k << "  recall " << report.recall(k) << "  ndcg "
              << report.ndcg(k) << "  precision " << report.precision(k) << "\n";
  }
  return kExitOk;
}

int cmd_ablate(const RunConfig& config) {
  const AblationResult result = run_ablation(config, config.out_dir / "ablation");
  std::ofstream tsv(config.out_dir / "ablation.tsv");
  nlohmann::json rows = nlohmann::json::array();
  tsv << "variant\tseed";
  for (int k : config.eval_ks) tsv << "\trecall@" << k << "\tndcg@" << k << "\tprecision@" << k;
  tsv << '\n';

  std::cout << std::left << std::setw(12) << "variant";
  for (int k : config.eval_ks) std::cout << std::setw(11) << ("R@" + std::to_string(k)) << std::setw(11) << ("N@" + std::to_string(k));
  std::cout << '\n';
  for (const auto& variant : result.variants) {
    std::map<int, TopKMetrics> mean;
    for (const auto seed : result.seeds) {
      const AblationCell& cell = result.at(variant, seed);
      tsv << variant << '\t' << seed;
      for (int k : config.eval_ks) {
        const TopKMetrics& m = cell.test.mean.at(k);
        tsv << '\t' << m.recall << '\t' << m.ndcg << '\t' << m.precision;
        mean[k].recall += m.recall / static_cast<double>(result.seeds.size());
        mean[k].ndcg += m.ndcg / static_cast<double>(result.seeds.size());
        mean[k].precision += m.precision / static_cast<double>(result.seeds.size());
      }
      tsv << '\n';
    }
    nlohmann::json row = {{"variant", variant}};
    std::cout << std::left << std::setw(12) << variant << std::fixed << std::setprecision(4);
    for (int k : config.eval_ks) {
      row[std::to_string(k)] = {{"recall", mean[k].recall}, {"ndcg", mean[k].ndcg}, {"precision", mean[k].precision}};
      std::cout << std::setw(11) << mean[k].recall << std::setw(11) << mean[k].ndcg;
    }
    std::cout << '\n';
    rows.push_back(row);
  }
  write_text(config.out_dir / "ablation.json", rows.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
  CLI::App app{"LLM-augmented graph recommendation: augment, train, evaluate, ablate"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string config_path;
  std::optional<std::string> seed, out, dataset, data_dir, checkpoint, epochs;
  std::optional<std::string> omega1, omega2, omega3, omega4, cand_size, temperature, top_p;
  std::optional<bool> mock_llm;
  std::vector<std::string> overrides;
  bool verbose = false;
  bool quiet = false;

  app.add_option("--config", config_path, "INI config file");
  app.add_option("--seed", seed, "root seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--dataset", dataset, "synthetic, netflix or movielens");
  app.add_option("--data-dir", data_dir, "directory of a real dataset");
  app.add_option("--checkpoint", checkpoint, "checkpoint to evaluate");
  app.add_option("--epochs", epochs, "maximum training epochs");
  app.add_option("--omega1", omega1, "feature incorporation scale");
  app.add_option("--omega2", omega2, "weight decay");
  app.add_option("--omega3", omega3, "augmented triplets per original triplet in a batch");
  app.add_option("--omega4", omega4, "fraction of largest-loss triplets pruned per batch");
  app.add_option("--cand-size", cand_size, "candidate pool size");
  app.add_option("--temperature", temperature, "sampling temperature of the language model");
  app.add_option("--top-p", top_p, "nucleus sampling mass of the language model");
  app.add_flag("--mock-llm,!--remote-llm", mock_llm, "use the offline mock (default) or the remote API");
  app.add_option("--set", overrides, "override any config key: --set section.key=value");
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  std::string command;
  for (const char* name : {"augment", "train", "evaluate", "ablate"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->callback([&command, name] { command = name; });
  }
  app.get_subcommand("augment")->description("select augmented triplets and generate user/item features");
  app.get_subcommand("train")->description("train the model and write checkpoint.bin and train_log.jsonl");
  app.get_subcommand("evaluate")->description("all-ranking test evaluation of a checkpoint");
  app.get_subcommand("ablate")->description("train the ablation grid and print a comparison table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    RunConfig config;
    if (!config_path.empty()) apply_config_file(config, config_path);
    const std::pair<const std::optional<std::string>*, const char*> flags[] = {
        {&seed, "run.seed"},
        {&out, "run.out_dir"},
        {&dataset, "dataset.name"},
        {&data_dir, "dataset.data_dir"},
        {&checkpoint, "run.checkpoint"},
        {&epochs, "train.epochs"},
        {&omega1, "train.incorporation_scale"},
        {&omega2, "train.weight_decay"},
        {&omega3, "train.aug_sample_rate"},
        {&omega4, "train.prune_rate"},
        {&cand_size, "augment.cand_size"},
        {&temperature, "augment.temperature"},
        {&top_p, "augment.top_p"}};
    for (const auto& [value, key] : flags) {
      if (*value) set_config_value(config, key, **value);
    }
    if (mock_llm) config.mock_llm = *mock_llm;
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + kv + "'");
      set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    config.validate();
    write_snapshot(config, command);

    if (command == "augment") return cmd_augment(config);
    if (command == "train") return cmd_train(config);
    if (command == "evaluate") return cmd_evaluate(config);
    return cmd_ablate(config);
  } catch (const UnknownConfigKey& e) {
    std::cerr << "error: invalid config key: " << e.key() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace augrec
