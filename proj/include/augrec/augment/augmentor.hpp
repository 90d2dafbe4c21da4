#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "augrec/augment/cache.hpp"
#include "augrec/augment/candidate_pool.hpp"
#include "augrec/augment/language_model.hpp"
#include "augrec/augment/response_parser.hpp"
#include "augrec/data/interaction_graph.hpp"

namespace augrec {

struct AugmentorConfig {
  double temperature = 0.6;
  double top_p = 0.1;
  std::string chat_model = "gpt-3.5-turbo-0613";
  std::string profile_model = "gpt-3.5-turbo-16k";   // longer context for full histories
  std::string embed_model = "text-embedding-ada-002";
  int max_retries = 3;           // extra attempts after the first
  double request_timeout = 60.0;  // seconds
  std::filesystem::path cache_path;
  int max_in_flight = 4;
  int embedding_dim = 1536;
  bool stream = false;
  double max_failure_rate = 0.1;

  void validate() const;
};

// Raised when too many subjects fail, or an embedding cannot be obtained.
class AugmentationFailure : public Error {
 public:
  AugmentationFailure(const std::string& what, std::string key) : Error(what), key_(std::move(key)) {}
  const std::string& cache_key() const { return key_; }

 private:
  std::string key_;
};

struct AugmentedTripletSet {
  std::vector<Triplet> triplets;
  std::vector<std::string> provenance;  // cache key per triplet
};

struct SideAugmentation {
  Matrix user_features;  // num_users x embedding_dim; zero rows for users that could not be profiled
  Matrix item_features;  // num_items x embedding_dim
  std::vector<AttributeRecord> user_attributes;
  std::vector<AttributeRecord> item_attributes;
};

struct AugmentationStats {
  long client_calls = 0;
  long cache_hits = 0;
  long retries = 0;
  long failures = 0;
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

nlohmann::json to_json(const AugmentationStats& stats);

class Augmentor {
 public:
  Augmentor(LanguageModel& model, AugmentationCache& cache, AugmentorConfig config);

  // One triplet per user, users visited in a seeded random order until
  // target_count triplets exist (0 means every user with a history and a pool).
  AugmentedTripletSet run_edge_augmentation(const CandidatePool& pool, const PromptContext& context,
                                            std::size_t target_count, std::uint64_t seed);

  // Profiles every user and item, then embeds the generated text.
  SideAugmentation run_side_augmentation(const PromptContext& context, int num_users, int num_items);

  // Cached embedding of `text`; `kind` and `subject` only label the cache record.
  std::vector<double> embed_text(const std::string& kind, int subject, const std::string& text);

  AugmentationStats stats() const;
  const AugmentorConfig& config() const { return config_; }

 private:
  template <typename Fn>
  void for_each_bounded(std::size_t n, Fn&& fn);

  nlohmann::json request_params(const std::string& model) const;
  ChatResponse call_chat(const ChatRequest& request);
  AttributeRecord generate_attributes(PromptKind kind, int subject, const PromptContext& context, bool& ok);

  LanguageModel& model_;
  AugmentationCache& cache_;
  AugmentorConfig config_;
  std::atomic<long> client_calls_{0};
  std::atomic<long> cache_hits_{0};
  std::atomic<long> retries_{0};
  std::atomic<long> failures_{0};
  std::atomic<long> prompt_tokens_{0};
  std::atomic<long> completion_tokens_{0};
};

// TSV with raw ids: user, positive item, negative item, provenance key.
void write_triplets(const std::filesystem::path& path, const AugmentedTripletSet& set, const InteractionGraph& graph);
AugmentedTripletSet read_triplets(const std::filesystem::path& path, const InteractionGraph& graph);

}  // namespace augrec
