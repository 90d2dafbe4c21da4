#include "augrec/cli/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <map>
#include <sstream>

#include "augrec/data/feature_bank.hpp"

namespace augrec {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("invalid value '" + text + "' for " + key);
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

using Field = ConfigField;

template <typename Member>
Field number_field(std::string key, std::string help, Member member) {
  using T = std::remove_reference_t<decltype(std::declval<RunConfig&>().*member)>;
  Field f;
  f.key = key;
  f.help = std::move(help);
  f.set = [key, member](RunConfig& c, const std::string& v) { c.*member = parse_number<T>(key, v); };
  f.get = [member](const RunConfig& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_double(c.*member);
    } else {
      return std::to_string(c.*member);
    }
  };
  return f;
}

// Fields nested one level down (config.train.lr and friends).
template <typename Outer, typename Inner>
Field nested_number(std::string key, std::string help, Outer outer, Inner inner) {
  using T = std::remove_reference_t<decltype((std::declval<RunConfig&>().*outer).*inner)>;
  Field f;
  f.key = key;
  f.help = std::move(help);
  f.set = [key, outer, inner](RunConfig& c, const std::string& v) { (c.*outer).*inner = parse_number<T>(key, v); };
  f.get = [outer, inner](const RunConfig& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_double((c.*outer).*inner);
    } else {
      return std::to_string((c.*outer).*inner);
    }
  };
  return f;
}

template <typename Outer, typename Inner>
Field nested_string(std::string key, std::string help, Outer outer, Inner inner) {
  Field f;
  f.key = std::move(key);
  f.help = std::move(help);
  f.set = [outer, inner](RunConfig& c, const std::string& v) { (c.*outer).*inner = v; };
  f.get = [outer, inner](const RunConfig& c) {
    if constexpr (std::is_same_v<std::remove_cvref_t<decltype((c.*outer).*inner)>, std::filesystem::path>) {
      return ((c.*outer).*inner).string();
    } else {
      return std::string((c.*outer).*inner);
    }
  };
  return f;
}

template <typename Member>
Field string_field(std::string key, std::string help, Member member) {
  Field f;
  f.key = std::move(key);
  f.help = std::move(help);
  f.set = [member](RunConfig& c, const std::string& v) { c.*member = v; };
  f.get = [member](const RunConfig& c) {
    if constexpr (std::is_same_v<std::remove_cvref_t<decltype(c.*member)>, std::filesystem::path>) {
      return (c.*member).string();
    } else {
      return std::string(c.*member);
    }
  };
  return f;
}

template <typename Getter>
Field bool_field(std::string key, std::string help, Getter access) {
  Field f;
  f.key = key;
  f.help = std::move(help);
  f.set = [key, access](RunConfig& c, const std::string& v) { access(c) = parse_bool(key, v); };
  f.get = [access](const RunConfig& c) { return access(const_cast<RunConfig&>(c)) ? "true" : "false"; };
  return f;
}

std::vector<Field> make_fields() {
  using C = RunConfig;
  std::vector<Field> f;
  f.push_back(number_field("run.seed", "root seed for every random substream", &C::seed));
  f.push_back(string_field("run.out_dir", "output directory", &C::out_dir));
  f.push_back(number_field("run.eval_threads", "threads used by evaluation", &C::eval_threads));
  f.push_back(string_field("run.checkpoint", "checkpoint read by evaluate", &C::checkpoint));

  f.push_back(nested_string("dataset.name", "synthetic, netflix or movielens", &C::dataset, &DatasetConfig::name));
  f.push_back(nested_string("dataset.data_dir", "directory of a real dataset", &C::dataset, &DatasetConfig::data_dir));
  auto ratio = [](std::string key, double SplitRatios::*m) {
    Field x;
    x.key = key;
    x.help = "split fraction";
    x.set = [key, m](C& c, const std::string& v) { c.dataset.ratios.*m = parse_number<double>(key, v); };
    x.get = [m](const C& c) { return format_double(c.dataset.ratios.*m); };
    return x;
  };
  f.push_back(ratio("dataset.train_ratio", &SplitRatios::train));
  f.push_back(ratio("dataset.val_ratio", &SplitRatios::val));
  f.push_back(ratio("dataset.test_ratio", &SplitRatios::test));
  auto synth_int = [](std::string key, int SyntheticConfig::*m) {
    Field x;
    x.key = key;
    x.help = "synthetic generator setting";
    x.set = [key, m](C& c, const std::string& v) { c.dataset.synthetic.*m = parse_number<int>(key, v); };
    x.get = [m](const C& c) { return std::to_string(c.dataset.synthetic.*m); };
    return x;
  };
  auto synth_real = [](std::string key, double SyntheticConfig::*m) {
    Field x;
    x.key = key;
    x.help = "synthetic generator setting";
    x.set = [key, m](C& c, const std::string& v) { c.dataset.synthetic.*m = parse_number<double>(key, v); };
    x.get = [m](const C& c) { return format_double(c.dataset.synthetic.*m); };
    return x;
  };
  f.push_back(synth_int("dataset.synthetic_users", &SyntheticConfig::num_users));
  f.push_back(synth_int("dataset.synthetic_items", &SyntheticConfig::num_items));
  f.push_back(synth_int("dataset.synthetic_factors", &SyntheticConfig::num_factors));
  f.push_back(synth_real("dataset.synthetic_density", &SyntheticConfig::density));
  f.push_back(synth_int("dataset.synthetic_textual_dim", &SyntheticConfig::textual_dim));
  f.push_back(synth_int("dataset.synthetic_visual_dim", &SyntheticConfig::visual_dim));
  f.push_back(synth_real("dataset.synthetic_feature_noise", &SyntheticConfig::feature_noise));
  f.push_back(synth_real("dataset.synthetic_click_noise", &SyntheticConfig::click_noise));
  f.push_back(synth_real("dataset.synthetic_genre_strength", &SyntheticConfig::genre_strength));
  f.push_back(synth_real("dataset.synthetic_preference_temperature", &SyntheticConfig::preference_temperature));

  f.push_back(nested_number("augment.temperature", "sampling temperature", &C::augment, &AugmentorConfig::temperature));
  f.push_back(nested_number("augment.top_p", "nucleus sampling mass", &C::augment, &AugmentorConfig::top_p));
  f.push_back(nested_string("augment.chat_model", "model for edge and item prompts", &C::augment, &AugmentorConfig::chat_model));
  f.push_back(nested_string("augment.profile_model", "model for user profiles", &C::augment, &AugmentorConfig::profile_model));
  f.push_back(nested_string("augment.embed_model", "embedding model", &C::augment, &AugmentorConfig::embed_model));
  f.push_back(nested_number("augment.max_retries", "extra attempts per subject", &C::augment, &AugmentorConfig::max_retries));
  f.push_back(nested_number("augment.request_timeout", "seconds per request", &C::augment, &AugmentorConfig::request_timeout));
  f.push_back(nested_string("augment.cache_path", "JSON-lines call cache; defaults to <out>/cache.jsonl", &C::augment, &AugmentorConfig::cache_path));
  f.push_back(nested_number("augment.max_in_flight", "concurrent requests", &C::augment, &AugmentorConfig::max_in_flight));
  f.push_back(nested_number("augment.embedding_dim", "embedding width", &C::augment, &AugmentorConfig::embedding_dim));
  f.push_back(bool_field("augment.stream", "stream responses (unsupported by the parser; keep false)",
                         [](C& c) -> bool& { return c.augment.stream; }));
  f.push_back(nested_number("augment.max_failure_rate", "abort above this failed fraction", &C::augment, &AugmentorConfig::max_failure_rate));
  f.push_back(nested_string("augment.endpoint", "base URL of the remote API", &C::remote, &RemoteModelSettings::endpoint));
  f.push_back(nested_string("augment.api_key_env", "environment variable holding the API key", &C::remote, &RemoteModelSettings::api_key_env));
  f.push_back(bool_field("augment.mock_llm", "use the offline mock instead of the remote API",
                         [](C& c) -> bool& { return c.mock_llm; }));
  f.push_back(number_field("augment.cand_size", "candidate pool size |C|", &C::cand_size));
  f.push_back(number_field("augment.edge_target", "augmented triplets to produce (0: one per user)", &C::edge_target));
  f.push_back(number_field("augment.base_epochs", "epochs of the candidate scorer", &C::base_epochs));
  f.push_back(string_field("augment.augment_dir", "where augmented files are read from", &C::augment_dir));

  f.push_back(nested_number("model.dim", "embedding size d", &C::model, &HyperParams::dim));
  f.push_back(nested_number("model.llm_dim", "augmented feature width", &C::model, &HyperParams::llm_dim));
  f.push_back(nested_number("model.num_layers", "propagation depth L", &C::model, &HyperParams::num_layers));
  f.push_back(nested_number("model.dropout", "projection dropout rate", &C::model, &HyperParams::dropout));

  f.push_back(nested_number("train.batch_size", "original triplets per batch B", &C::train, &TrainConfig::batch_size));
  f.push_back(nested_number("train.lr", "learning rate", &C::train, &TrainConfig::lr));
  f.push_back(nested_number("train.epochs", "maximum epochs", &C::train, &TrainConfig::epochs));
  f.push_back(nested_number("train.weight_decay", "omega2", &C::train, &TrainConfig::weight_decay));
  f.push_back(nested_number("train.aug_sample_rate", "omega3", &C::train, &TrainConfig::aug_sample_rate));
  f.push_back(nested_number("train.prune_rate", "omega4", &C::train, &TrainConfig::prune_rate));
  f.push_back(nested_number("train.incorporation_scale", "omega1", &C::train, &TrainConfig::incorporation_scale));
  f.push_back(nested_number("train.fr_gamma", "restoration exponent", &C::train, &TrainConfig::fr_gamma));
  f.push_back(nested_number("train.fr_weight", "restoration loss weight", &C::train, &TrainConfig::fr_weight));
  f.push_back(nested_number("train.mask_rate", "fraction of nodes masked per epoch", &C::train, &TrainConfig::mask_rate));
  f.push_back(nested_number("train.patience", "early-stopping patience in epochs", &C::train, &TrainConfig::patience));
  f.push_back(nested_number("train.eval_k", "K of the validation recall", &C::train, &TrainConfig::eval_k));
  f.push_back(nested_number("train.eval_every", "epochs between validations", &C::train, &TrainConfig::eval_every));
  f.push_back(nested_number("train.adam_beta1", "first-moment decay", &C::train, &TrainConfig::adam_beta1));
  f.push_back(nested_number("train.adam_beta2", "second-moment decay", &C::train, &TrainConfig::adam_beta2));
  f.push_back(nested_number("train.adam_eps", "optimizer epsilon", &C::train, &TrainConfig::adam_eps));
  f.push_back(bool_field("train.use_aug_edges", "train with augmented triplets", [](C& c) -> bool& { return c.use_aug_edges; }));
  f.push_back(bool_field("train.use_aug_user", "train with augmented user features", [](C& c) -> bool& { return c.use_aug_user; }));
  f.push_back(bool_field("train.use_aug_item", "train with augmented item features", [](C& c) -> bool& { return c.use_aug_item; }));

  Field ks;
  ks.key = "eval.ks";
  ks.help = "comma-separated cutoffs";
  ks.set = [](C& c, const std::string& v) {
    std::vector<int> out;
    std::stringstream in(v);
    std::string part;
    while (std::getline(in, part, ',')) {
      const auto b = part.find_first_not_of(' ');
      const auto e = part.find_last_not_of(' ');
      if (b == std::string::npos) continue;
      out.push_back(parse_number<int>("eval.ks", part.substr(b, e - b + 1)));
    }
    c.eval_ks = std::move(out);
  };
  ks.get = [](const C& c) {
    std::string s;
    for (std::size_t k = 0; k < c.eval_ks.size(); ++k) s += (k ? "," : "") + std::to_string(c.eval_ks[k]);
    return s;
  };
  f.push_back(std::move(ks));
  f.push_back(number_field("ablate.seeds", "paired seeds per ablation row", &C::ablate_seeds));
  return f;
}

const ConfigField& find_field(const std::string& key) {
  static const std::map<std::string, const ConfigField*> index = [] {
    std::map<std::string, const ConfigField*> m;
    for (const auto& f : config_fields()) m[f.key] = &f;
    return m;
  }();
  const auto it = index.find(key);
  if (it == index.end()) throw UnknownConfigKey(key);
  return *it->second;
}

}  // namespace

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = make_fields();
  return fields;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  find_field(key).set(config, value);
}

std::string get_config_value(const RunConfig& config, const std::string& key) { return find_field(key).get(config); }

void RunConfig::validate() const {
  if (dataset.name != "synthetic" && dataset.name != "netflix" && dataset.name != "movielens") {
    throw ConfigError("dataset.name must be synthetic, netflix or movielens");
  }
  if (dataset.name != "synthetic" && dataset.data_dir.empty()) {
    throw ConfigError("dataset.data_dir is required for dataset " + dataset.name);
  }
  dataset.ratios.validate();
  dataset.synthetic.validate();
  augment.validate();
  model.validate();
  train.validate();
  if (augment.embedding_dim != model.llm_dim) {
    throw ConfigError("augment.embedding_dim must equal model.llm_dim");
  }
  if (augment.stream) throw ConfigError("augment.stream=true is not supported");
  if (cand_size < 2) throw ConfigError("augment.cand_size must be >= 2");
  if (base_epochs < 1) throw ConfigError("augment.base_epochs must be >= 1");
  if (eval_threads < 1) throw ConfigError("run.eval_threads must be >= 1");
  if (eval_ks.empty()) throw ConfigError("eval.ks must list at least one cutoff");
  for (int k : eval_ks) {
    if (k < 1) throw ConfigError("eval.ks entries must be >= 1");
  }
  if (ablate_seeds < 1) throw ConfigError("ablate.seeds must be >= 1");
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingInputError("config file not found: " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw UnknownConfigKey(section);  // top-level key outside any section
    for (const auto& [key, value] : body) set_config_value(config, section + "." + key, value.data());
  }
}

std::string render_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : config_fields()) {
    const auto dot = f.key.find('.');
    const std::string s = f.key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << '\n';
      out << '[' << s << "]\n";
      section = s;
    }
    out << f.key.substr(dot + 1) << " = " << f.get(config) << '\n';
  }
  return out.str();
}

std::string config_hash(const RunConfig& config) { return sha256_hex(render_config(config)); }

}  // namespace augrec
