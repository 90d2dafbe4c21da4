#pragma once

#include <string>
#include <vector>

#include "augrec/augment/prompt.hpp"

namespace augrec {

// Network failure, timeout or non-success HTTP status. Retried by the augmentor.
class TransportError : public Error {
 public:
  using Error::Error;
};

struct ChatRequest {
  std::string model;
  const PromptRecord* prompt = nullptr;
  double temperature = 0.6;
  double top_p = 0.1;
  bool stream = false;
};

struct ChatResponse {
  std::string text;
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct EmbeddingRequest {
  std::string model;
  std::string text;
};

struct EmbeddingResponse {
  std::vector<double> values;
  long prompt_tokens = 0;
};

// Chat-completion plus embedding backend. Implementations must be safe to call
// from several threads at once.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual ChatResponse chat(const ChatRequest& request) = 0;
  virtual EmbeddingResponse embed(const EmbeddingRequest& request) = 0;
  virtual std::string name() const = 0;
};

}  // namespace augrec
