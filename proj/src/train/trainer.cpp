#include "augrec/train/trainer.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <fstream>

#include "augrec/data/adjacency.hpp"
#include "augrec/eval/evaluator.hpp"
#include "augrec/model/encoder.hpp"
#include "augrec/train/objective.hpp"
#include "augrec/train/optimizer.hpp"
#include "augrec/train/sampler.hpp"

namespace augrec {

nlohmann::json to_json(const EpochLog& log, int eval_k, bool include_wall_time) {
  nlohmann::json j;
  j["epoch"] = log.epoch;
  j["bpr_loss"] = log.bpr_loss;
  j["fr_loss"] = log.fr_loss;
  j["pruned_count"] = log.pruned_count;
  if (log.val) {
    const std::string k = std::to_string(eval_k);
    j["val"] = {{"recall@" + k, log.val->recall}, {"ndcg@" + k, log.val->ndcg},
                {"precision@" + k, log.val->precision}};
  } else {
    j["val"] = nullptr;
  }
  if (include_wall_time) j["wall_time"] = log.wall_time;
  return j;
}

Matrix representations(const ModelState& state, const FeatureBank& bank, const DatasetSplit& split,
                       double omega1) {
  const NormalizedAdjacency adj(split.train, state.num_users(), state.num_items());
  return encode(state, bank, adj, {omega1, false, 0}).h;
}

namespace {

void write_diagnostics(const std::filesystem::path& path, const nlohmann::json& info) {
  if (path.empty()) return;
  std::ofstream out(path);
  out << info.dump(2) << '\n';
}

}  // namespace

FitResult fit(const HyperParams& hp, const TrainConfig& config, const FitInputs& inputs,
              const FitOptions& options) {
  hp.validate();
  config.validate();
  if (!inputs.split || !inputs.bank) throw ConfigError("fit needs a split and a feature bank");
  const DatasetSplit& split = *inputs.split;
  const FeatureBank& bank = *inputs.bank;
  const int nu = inputs.num_users;
  const int ni = inputs.num_items;
  bank.validate(nu, ni);

  const TrainingSet train(split.train, nu, ni);
  const NormalizedAdjacency adj(split.train, nu, ni);

  Rng init_rng = make_rng(config.seed, "init");
  Rng batch_rng = make_rng(config.seed, "batch");
  FitResult result{init_model(hp, nu, ni, bank, init_rng), {}, 0, -1.0, false};
  ModelState& state = result.state;
  AdamW optimizer(state, {config.lr, config.adam_beta1, config.adam_beta2, config.adam_eps, config.weight_decay});

  ObjectiveSettings settings = ObjectiveSettings::from(config);
  settings.training = true;

  const std::vector<int> maskable = maskable_nodes(state, bank);
  const bool use_restoration = config.fr_weight > 0.0 && !maskable.empty();
  if (config.aug_sample_rate > 0.0 && inputs.augmented.empty()) {
    spdlog::warn("augmented triplet set is empty; batches carry no augmented triplets");
  }
  const bool can_validate = !split.val.empty();
  if (!can_validate) spdlog::warn("validation split is empty; early stopping disabled");

  const std::size_t steps_per_epoch =
      (split.train.size() + static_cast<std::size_t>(config.batch_size) - 1) / static_cast<std::size_t>(config.batch_size);

  std::ofstream log_file;
  if (!options.log_path.empty()) {
    log_file.open(options.log_path);
    if (!log_file) throw Error("cannot write training log " + options.log_path.string());
  }

  std::optional<ModelState> best;
  int since_best = 0;
  const auto start = std::chrono::steady_clock::now();
  ModelState grad = state.zeros_like();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochLog entry;
    entry.epoch = epoch;
    MaskSelection mask;
    if (use_restoration) {
      mask = select_masked_nodes(maskable, config.mask_rate,
                                 derive_seed(config.seed, "mask/epoch/" + std::to_string(epoch)));
    }

    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      const BatchSample batch =
          sample_batch(train, inputs.augmented, config.batch_size, config.aug_sample_rate, batch_rng);
      settings.dropout_seed =
          derive_seed(config.seed, "dropout/" + std::to_string(epoch) + "/" + std::to_string(step));
      const ObjectiveValue value = evaluate_objective(state, bank, adj, batch.triplets,
                                                      use_restoration ? &mask : nullptr, settings, &grad, false);
      if (!std::isfinite(value.total)) {
        nlohmann::json info = {{"epoch", epoch}, {"step", step}, {"bpr_data", value.bpr_data},
                               {"regularization", value.regularization}, {"fr", value.fr},
                               {"parameters_finite", state.all_finite()}};
        write_diagnostics(options.diagnostics_path, info);
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + ": " + info.dump());
      }
      optimizer.step(state, grad);
      if (!state.all_finite()) {
        nlohmann::json info = {{"epoch", epoch}, {"step", step}, {"total", value.total}};
        for (const auto& p : state.parameters()) {
          for (std::size_t i = 0; i < p.size; ++i) {
            if (!std::isfinite(p.data[i])) {
              info["first_bad_parameter"] = p.name;
              info["index"] = i;
              break;
            }
          }
          if (info.contains("first_bad_parameter")) break;
        }
        write_diagnostics(options.diagnostics_path, info);
        throw DivergenceError("non-finite parameters after epoch " + std::to_string(epoch) + ": " + info.dump());
      }
      entry.bpr_loss += value.bpr_data;
      entry.fr_loss += value.fr;
      entry.pruned_count += value.pruned;
    }
    entry.bpr_loss /= static_cast<double>(steps_per_epoch);
    entry.fr_loss /= static_cast<double>(steps_per_epoch);

    bool stop = false;
    if (can_validate && (epoch % config.eval_every == 0 || epoch == config.epochs)) {
      EvalOptions eval;
      eval.target = EvalTarget::validation;
      eval.ks = {config.eval_k};
      eval.threads = options.eval_threads;
      const Matrix h = encode(state, bank, adj, {settings.omega1, false, 0}).h;
      const EvalReport report = evaluate_all_ranking(h, nu, split, eval);
      entry.val = report.mean.at(config.eval_k);
      if (entry.val->recall > result.best_val_recall) {
        result.best_val_recall = entry.val->recall;
        result.best_epoch = epoch;
        best = state;
        since_best = 0;
      } else {
        since_best += config.eval_every;
        stop = config.patience > 0 && since_best >= config.patience;
      }
    }
    entry.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (log_file) log_file << to_json(entry, config.eval_k).dump() << '\n';
    if (options.on_epoch) options.on_epoch(entry);
    spdlog::debug("epoch {} bpr {:.5f} fr {:.5f}", epoch, entry.bpr_loss, entry.fr_loss);
    result.log.push_back(std::move(entry));
    if (stop) {
      result.early_stopped = true;
      break;
    }
  }

  if (best) {
    state = std::move(*best);
  } else {
    result.best_epoch = static_cast<int>(result.log.size());
    result.best_val_recall = 0.0;
  }
  return result;
}

}  // namespace augrec
