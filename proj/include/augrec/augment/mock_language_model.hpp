#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "augrec/augment/language_model.hpp"
#include "augrec/core.hpp"

namespace augrec {

// Deterministic offline stand-in for a hosted model.
//
// Edge prompts: POS is the candidate whose feature row is most cosine-similar to
// the mean feature row of the user's history, NEG the least similar one.
// Profile prompts: templated from the history; the liked genre is the most
// frequent history genre. Item prompts: attributes hashed from the title and
// first genre. Embeddings: normalized sum of seeded per-token random vectors,
// so texts sharing words land close together.
class MockLanguageModel : public LanguageModel {
 public:
  MockLanguageModel(const PromptContext& context, Matrix item_features, std::uint64_t seed,
                    int embedding_dim = 1536);

  ChatResponse chat(const ChatRequest& request) override;
  EmbeddingResponse embed(const EmbeddingRequest& request) override;
  std::string name() const override { return "mock"; }

  long chat_calls() const { return chat_calls_.load(); }
  long embed_calls() const { return embed_calls_.load(); }

 private:
  std::string answer_edge(const PromptRecord& prompt) const;
  std::string answer_profile(const PromptRecord& prompt) const;
  std::string answer_item(const PromptRecord& prompt) const;

  PromptContext context_;
  Matrix item_features_;
  std::uint64_t seed_;
  int embedding_dim_;
  std::atomic<long> chat_calls_{0};
  std::atomic<long> embed_calls_{0};
};

// Approximate token count (whitespace-separated words) used by the mock.
long count_words(std::string_view text);

}  // namespace augrec
