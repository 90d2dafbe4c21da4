#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "augrec/augment/augmentor.hpp"
#include "augrec/augment/remote_language_model.hpp"
#include "augrec/data/split.hpp"
#include "augrec/data/synthetic.hpp"
#include "augrec/model/model_state.hpp"
#include "augrec/train/config.hpp"

namespace augrec {

struct DatasetConfig {
  std::string name = "synthetic";  // synthetic, netflix, movielens
  std::filesystem::path data_dir;  // holds interactions.tsv, items.tsv, textual.*, visual.*
  SyntheticConfig synthetic;
  SplitRatios ratios;
};

struct RunConfig {
  std::uint64_t seed = 2024;
  std::filesystem::path out_dir = "runs/default";
  DatasetConfig dataset;

  AugmentorConfig augment;
  RemoteModelSettings remote;
  bool mock_llm = true;
  int cand_size = 10;              // |C_u|
  std::size_t edge_target = 0;     // 0: one triplet per eligible user
  int base_epochs = 40;            // epochs of the BPR-MF model that scores candidates
  std::filesystem::path augment_dir;  // where train/evaluate read E_A and F_A; defaults to out_dir

  HyperParams model;
  TrainConfig train;
  bool use_aug_edges = true;
  bool use_aug_user = true;
  bool use_aug_item = true;

  std::vector<int> eval_ks = {10, 20, 50};
  int eval_threads = 1;
  std::filesystem::path checkpoint;  // evaluate; defaults to out_dir/checkpoint.bin

  int ablate_seeds = 1;            // seeds seed, seed+1, ...

  void validate() const;
  std::filesystem::path resolved_augment_dir() const { return augment_dir.empty() ? out_dir : augment_dir; }
};

// Unknown "section.key".
class UnknownConfigKey : public ConfigError {
 public:
  explicit UnknownConfigKey(const std::string& key) : ConfigError("unknown config key '" + key + "'"), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ConfigField {
  std::string key;  // "section.key"
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Every settable field, in snapshot order.
const std::vector<ConfigField>& config_fields();

// Throws UnknownConfigKey or ConfigError (unparsable value).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& config, const std::string& key);

// INI file with one section per module; keys are looked up as "section.key".
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

// Resolved snapshot in the same INI format, loadable by apply_config_file.
std::string render_config(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace augrec
