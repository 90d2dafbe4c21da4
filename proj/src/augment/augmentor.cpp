#include "augrec/augment/augmentor.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace augrec {

void AugmentorConfig::validate() const {
  if (temperature < 0) throw ConfigError("augment.temperature must be >= 0");
  if (top_p < 0 || top_p > 1) throw ConfigError("augment.top_p must be in [0, 1]");
  if (chat_model.empty() || profile_model.empty() || embed_model.empty()) {
    throw ConfigError("augment model names must not be empty");
  }
  if (max_retries < 0) throw ConfigError("augment.max_retries must be >= 0");
  if (request_timeout <= 0) throw ConfigError("augment.request_timeout must be > 0");
  if (max_in_flight < 1) throw ConfigError("augment.max_in_flight must be >= 1");
  if (embedding_dim < 1) throw ConfigError("augment.embedding_dim must be >= 1");
  if (max_failure_rate < 0 || max_failure_rate > 1) throw ConfigError("augment.max_failure_rate must be in [0, 1]");
}

nlohmann::json to_json(const AugmentationStats& s) {
  return {{"client_calls", s.client_calls}, {"cache_hits", s.cache_hits},       {"retries", s.retries},
          {"failures", s.failures},         {"prompt_tokens", s.prompt_tokens}, {"completion_tokens", s.completion_tokens}};
}

Augmentor::Augmentor(LanguageModel& model, AugmentationCache& cache, AugmentorConfig config)
    : model_(model), cache_(cache), config_(std::move(config)) {
  config_.validate();
}

AugmentationStats Augmentor::stats() const {
  return {client_calls_.load(), cache_hits_.load(),  retries_.load(),
          failures_.load(),     prompt_tokens_.load(), completion_tokens_.load()};
}

template <typename Fn>
void Augmentor::for_each_bounded(std::size_t n, Fn&& fn) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config_.max_in_flight), n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) {
          try {
            fn(k);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

nlohmann::json Augmentor::request_params(const std::string& model) const {
  return {{"model", model}, {"temperature", config_.temperature}, {"top_p", config_.top_p}, {"stream", config_.stream}};
}

ChatResponse Augmentor::call_chat(const ChatRequest& request) {
  ++client_calls_;
  ChatResponse response = model_.chat(request);
  prompt_tokens_ += response.prompt_tokens;
  completion_tokens_ += response.completion_tokens;
  return response;
}

AugmentedTripletSet Augmentor::run_edge_augmentation(const CandidatePool& pool, const PromptContext& context,
                                                     std::size_t target_count, std::uint64_t seed) {
  std::vector<int> users;
  for (int u = 0; u < pool.num_users(); ++u) {
    const bool has_history = context.history && static_cast<std::size_t>(u) < context.history->size() &&
                             !(*context.history)[static_cast<std::size_t>(u)].empty();
    if (has_history && pool.of(u).size() >= 2) users.push_back(u);
  }
  Rng rng(seed);
  std::shuffle(users.begin(), users.end(), rng);
  if (target_count > 0 && users.size() > target_count) users.resize(target_count);

  const nlohmann::json params = request_params(config_.chat_model);
  std::vector<std::optional<std::pair<Triplet, std::string>>> results(users.size());
  std::atomic<long> failed{0};

  for_each_bounded(users.size(), [&](std::size_t slot) {
    const int u = users[slot];
    const PromptRecord prompt = build_prompt(PromptKind::ui_edge, u, context, pool.of(u));
    const std::string key = cache_key("ui_edge", u, sha256_hex(prompt.text + "\n" + params.dump()));

    if (auto hit = cache_.find(key)) {
      ++cache_hits_;
      const int pos = hit->parsed.at("pos_item").get<int>();
      const int neg = hit->parsed.at("neg_item").get<int>();
      results[slot] = {{Triplet{u, pos, neg}, key}};
      return;
    }
    ChatRequest request{config_.chat_model, &prompt, config_.temperature, config_.top_p, config_.stream};
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) ++retries_;
      try {
        const ChatResponse response = call_chat(request);
        const EdgeChoice choice = parse_edge_response(response.text, prompt.candidates);
        CacheRecord record{"ui_edge", u, key.substr(key.rfind('|') + 1), params, response.text,
                           {{"pos_index", choice.pos_index}, {"neg_index", choice.neg_index},
                            {"pos_item", choice.pos_item}, {"neg_item", choice.neg_item}},
                           response.prompt_tokens, response.completion_tokens};
        cache_.append(record);
        results[slot] = {{Triplet{u, choice.pos_item, choice.neg_item}, key}};
        return;
      } catch (const TransportError& e) {
        spdlog::debug("user {} attempt {}: {}", u, attempt + 1, e.what());
      } catch (const ResponseError& e) {
        spdlog::debug("user {} attempt {}: {}", u, attempt + 1, e.what());
      }
    }
    ++failed;
    ++failures_;
    spdlog::warn("user {} skipped after {} attempts", u, config_.max_retries + 1);
  });

  if (!users.empty() &&
      static_cast<double>(failed.load()) > config_.max_failure_rate * static_cast<double>(users.size())) {
    throw AugmentationFailure("edge augmentation failed for " + std::to_string(failed.load()) + " of " +
                                  std::to_string(users.size()) + " users",
                              "");
  }
  AugmentedTripletSet out;
  for (auto& r : results) {
    if (!r) continue;
    out.triplets.push_back(r->first);
    out.provenance.push_back(std::move(r->second));
  }
  return out;
}

std::vector<double> Augmentor::embed_text(const std::string& kind, int subject, const std::string& text) {
  if (text.empty()) throw DataError("cannot embed empty text");
  const std::string key = cache_key(kind, subject, sha256_hex(config_.embed_model + "\n" + text));
  if (auto hit = cache_.find(key)) {
    ++cache_hits_;
    return hit->parsed.get<std::vector<double>>();
  }
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) ++retries_;
    try {
      ++client_calls_;
      EmbeddingResponse response = model_.embed({config_.embed_model, text});
      prompt_tokens_ += response.prompt_tokens;
      if (static_cast<int>(response.values.size()) != config_.embedding_dim) {
        throw ResponseError("embedding has length " + std::to_string(response.values.size()) + ", expected " +
                            std::to_string(config_.embedding_dim));
      }
      CacheRecord record{kind, subject, key.substr(key.rfind('|') + 1), {{"model", config_.embed_model}}, "",
                         response.values, response.prompt_tokens, 0};
      cache_.append(record);
      return std::move(response.values);
    } catch (const TransportError& e) {
      last_error = e.what();
    } catch (const ResponseError& e) {
      last_error = e.what();
    }
  }
  throw AugmentationFailure("embedding failed after " + std::to_string(config_.max_retries + 1) +
                                " attempts: " + last_error,
                            key);
}

AttributeRecord Augmentor::generate_attributes(PromptKind kind, int subject, const PromptContext& context, bool& ok) {
  ok = false;
  const PromptRecord prompt = build_prompt(kind, subject, context);
  const std::string& model = kind == PromptKind::user_profile ? config_.profile_model : config_.chat_model;
  const nlohmann::json params = request_params(model);
  const std::string kind_name(to_string(kind));
  const std::string hash = sha256_hex(prompt.text + "\n" + params.dump());
  const std::string key = cache_key(kind_name, subject, hash);
  if (auto hit = cache_.find(key)) {
    ++cache_hits_;
    ok = true;
    return hit->parsed.get<AttributeRecord>();
  }
  ChatRequest request{model, &prompt, config_.temperature, config_.top_p, config_.stream};
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) ++retries_;
    try {
      const ChatResponse response = call_chat(request);
      AttributeRecord attrs = parse_attribute_response(kind, response.text);
      cache_.append({kind_name, subject, hash, params, response.text, attrs, response.prompt_tokens,
                     response.completion_tokens});
      ok = true;
      return attrs;
    } catch (const TransportError& e) {
      spdlog::debug("{} {} attempt {}: {}", kind_name, subject, attempt + 1, e.what());
    } catch (const ResponseError& e) {
      spdlog::debug("{} {} attempt {}: {}", kind_name, subject, attempt + 1, e.what());
    }
  }
  return {};
}

SideAugmentation Augmentor::run_side_augmentation(const PromptContext& context, int num_users, int num_items) {
  SideAugmentation out;
  out.user_features = Matrix::Zero(num_users, config_.embedding_dim);
  out.item_features = Matrix::Zero(num_items, config_.embedding_dim);
  out.user_attributes.resize(static_cast<std::size_t>(num_users));
  out.item_attributes.resize(static_cast<std::size_t>(num_items));

  struct Subject {
    PromptKind kind;
    int index;
  };
  std::vector<Subject> subjects;
  int without_history = 0;
  for (int u = 0; u < num_users; ++u) {
    const bool has_history = context.history && static_cast<std::size_t>(u) < context.history->size() &&
                             !(*context.history)[static_cast<std::size_t>(u)].empty();
    if (has_history) {
      subjects.push_back({PromptKind::user_profile, u});
    } else {
      ++without_history;
    }
  }
  if (without_history > 0) spdlog::warn("{} users have no history; their profile features stay zero", without_history);
  for (int i = 0; i < num_items; ++i) subjects.push_back({PromptKind::item_attr, i});

  std::atomic<long> failed{0};
  for_each_bounded(subjects.size(), [&](std::size_t k) {
    const Subject s = subjects[k];
    const bool user = s.kind == PromptKind::user_profile;
    bool ok = false;
    AttributeRecord attrs = generate_attributes(s.kind, s.index, context, ok);
    if (!ok) {
      ++failed;
      ++failures_;
      spdlog::warn("{} {} skipped after {} attempts", to_string(s.kind), s.index, config_.max_retries + 1);
      return;
    }
    try {
      const auto vec = embed_text(user ? "embed_user" : "embed_item", s.index, render_attributes(s.kind, attrs));
      Matrix& target = user ? out.user_features : out.item_features;
      for (int c = 0; c < config_.embedding_dim; ++c) target(s.index, c) = vec[static_cast<std::size_t>(c)];
    } catch (const AugmentationFailure& e) {
      ++failed;
      ++failures_;
      spdlog::warn("{} {}: {}", to_string(s.kind), s.index, e.what());
      return;
    }
    (user ? out.user_attributes : out.item_attributes)[static_cast<std::size_t>(s.index)] = std::move(attrs);
  });

  if (!subjects.empty() &&
      static_cast<double>(failed.load()) > config_.max_failure_rate * static_cast<double>(subjects.size())) {
    throw AugmentationFailure("side augmentation failed for " + std::to_string(failed.load()) + " of " +
                                  std::to_string(subjects.size()) + " subjects",
                              "");
  }
  return out;
}

void write_triplets(const std::filesystem::path& path, const AugmentedTripletSet& set, const InteractionGraph& graph) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t k = 0; k < set.triplets.size(); ++k) {
    const Triplet& t = set.triplets[k];
    out << graph.users.raw(t.user) << '\t' << graph.items.raw(t.pos) << '\t' << graph.items.raw(t.neg) << '\t'
        << (k < set.provenance.size() ? set.provenance[k] : std::string()) << '\n';
  }
}

AugmentedTripletSet read_triplets(const std::filesystem::path& path, const InteractionGraph& graph) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot read augmented triplets " + path.string());
  AugmentedTripletSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string u, p, n, provenance;
    if (!(fields >> u >> p >> n)) throw ParseError("expected user, positive and negative ids", lineno);
    fields >> provenance;
    const auto ui = graph.users.find(u);
    const auto pi = graph.items.find(p);
    const auto ni = graph.items.find(n);
    if (!ui || !pi || !ni) throw ParseError("triplet references an unknown id", lineno);
    set.triplets.push_back({*ui, *pi, *ni});
    set.provenance.push_back(provenance);
  }
  return set;
}

}  // namespace augrec
