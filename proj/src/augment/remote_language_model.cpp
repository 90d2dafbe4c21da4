#include "augrec/augment/remote_language_model.hpp"

#include <cmath>
#include <cstdlib>

#include "json.hpp"

// After Eigen: httplib pulls in <resolv.h>, which defines a `_res` macro.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace augrec {

RemoteLanguageModel::RemoteLanguageModel(RemoteModelSettings settings) : settings_(std::move(settings)) {
  if (settings_.endpoint.empty()) throw ConfigError("augment.endpoint must not be empty");
  if (settings_.timeout_seconds <= 0) throw ConfigError("augment.request_timeout must be > 0");
  const char* key = std::getenv(settings_.api_key_env.c_str());
  if (!key || !*key) {
    throw ConfigError("environment variable " + settings_.api_key_env + " holds no API key");
  }
  api_key_ = key;
}

std::string RemoteLanguageModel::post(const std::string& path, const std::string& body) const {
  httplib::Client client(settings_.endpoint);
  const auto secs = static_cast<time_t>(settings_.timeout_seconds);
  const auto usecs = static_cast<time_t>((settings_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_bearer_token_auth(api_key_);
  auto res = client.Post(path, body, "application/json");
  if (!res) throw TransportError("request to " + settings_.endpoint + path + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw TransportError("request to " + settings_.endpoint + path + " returned HTTP " + std::to_string(res->status) +
                         ": " + res->body.substr(0, 200));
  }
  return res->body;
}

ChatResponse RemoteLanguageModel::chat(const ChatRequest& request) {
  if (!request.prompt) throw ConfigError("chat request without a prompt");
  const nlohmann::json body = {
      {"model", request.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt->text}}})},
      {"temperature", request.temperature},
      {"top_p", request.top_p},
      {"stream", request.stream}};
  const std::string raw = post(settings_.chat_path, body.dump());
  try {
    const auto j = nlohmann::json::parse(raw);
    ChatResponse out;
    out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage")) {
      out.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
      out.completion_tokens = j["usage"].value("completion_tokens", 0L);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what());
  }
}

EmbeddingResponse RemoteLanguageModel::embed(const EmbeddingRequest& request) {
  if (request.text.empty()) throw DataError("cannot embed empty text");
  const nlohmann::json body = {{"model", request.model}, {"input", request.text}};
  const std::string raw = post(settings_.embed_path, body.dump());
  try {
    const auto j = nlohmann::json::parse(raw);
    EmbeddingResponse out;
    out.values = j.at("data").at(0).at("embedding").get<std::vector<double>>();
    for (double v : out.values) {
      if (!std::isfinite(v)) throw TransportError("embedding contains a non-finite value");
    }
    if (j.contains("usage")) out.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed embedding response: ") + e.what());
  }
}

}  // namespace augrec
