#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"

namespace augrec {

// One completed language-model call.
struct CacheRecord {
  std::string kind;            // ui_edge, user_profile, item_attr, embed_user, embed_item
  int subject = 0;
  std::string prompt_sha256;
  nlohmann::json request;      // model, temperature, top_p, stream
  std::string raw_response;
  nlohmann::json parsed;
  long prompt_tokens = 0;
  long completion_tokens = 0;

  std::string key() const;
};

std::string cache_key(const std::string& kind, int subject, const std::string& prompt_sha256);

nlohmann::json to_json(const CacheRecord& record);
CacheRecord cache_record_from_json(const nlohmann::json& j);

// Append-only JSON-lines store keyed by (kind, subject, prompt hash). Existing
// records are loaded on open; a later record for the same key wins. Lookups and
// appends are thread-safe; appends are flushed immediately.
class AugmentationCache {
 public:
  explicit AugmentationCache(const std::filesystem::path& path);
  // In-memory cache that persists nothing.
  AugmentationCache() = default;

  std::optional<CacheRecord> find(const std::string& key) const;
  void append(const CacheRecord& record);
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, CacheRecord> records_;
  std::ofstream out_;
};

}  // namespace augrec
