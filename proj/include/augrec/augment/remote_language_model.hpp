#pragma once

#include <string>

#include "augrec/augment/language_model.hpp"

namespace augrec {

struct RemoteModelSettings {
  std::string endpoint = "https://api.openai.com";  // scheme://host[:port]
  std::string chat_path = "/v1/chat/completions";
  std::string embed_path = "/v1/embeddings";
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_seconds = 60.0;
};

// Client for OpenAI-compatible chat-completion and embedding endpoints. The API
// key is read from the environment variable named in the settings when the
// client is constructed. A fresh connection is used per request, so calls may
// run concurrently.
class RemoteLanguageModel : public LanguageModel {
 public:
  explicit RemoteLanguageModel(RemoteModelSettings settings);

  ChatResponse chat(const ChatRequest& request) override;
  EmbeddingResponse embed(const EmbeddingRequest& request) override;
  std::string name() const override { return "remote:" + settings_.endpoint; }

 private:
  std::string post(const std::string& path, const std::string& body) const;

  RemoteModelSettings settings_;
  std::string api_key_;
};

}  // namespace augrec
