#include "augrec/augment/cache.hpp"

#include <spdlog/spdlog.h>

#include "augrec/core.hpp"

namespace augrec {

std::string cache_key(const std::string& kind, int subject, const std::string& prompt_sha256) {
  return kind + "|" + std::to_string(subject) + "|" + prompt_sha256;
}

std::string CacheRecord::key() const { return cache_key(kind, subject, prompt_sha256); }

nlohmann::json to_json(const CacheRecord& r) {
  return {{"kind", r.kind},
          {"subject", r.subject},
          {"prompt_sha256", r.prompt_sha256},
          {"request", r.request},
          {"raw_response", r.raw_response},
          {"parsed", r.parsed},
          {"tokens", {{"prompt", r.prompt_tokens}, {"completion", r.completion_tokens}}}};
}

CacheRecord cache_record_from_json(const nlohmann::json& j) {
  CacheRecord r;
  r.kind = j.at("kind").get<std::string>();
  r.subject = j.at("subject").get<int>();
  r.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
  r.request = j.value("request", nlohmann::json::object());
  r.raw_response = j.value("raw_response", std::string());
  r.parsed = j.value("parsed", nlohmann::json());
  if (j.contains("tokens")) {
    r.prompt_tokens = j["tokens"].value("prompt", 0L);
    r.completion_tokens = j["tokens"].value("completion", 0L);
  }
  return r;
}

AugmentationCache::AugmentationCache(const std::filesystem::path& path) : path_(path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        CacheRecord r = cache_record_from_json(nlohmann::json::parse(line));
        records_[r.key()] = std::move(r);
      } catch (const nlohmann::json::exception& e) {
        // A crash mid-append can leave a truncated final line; anything else is corruption.
        if (in.peek() == std::char_traits<char>::eof()) {
          spdlog::warn("ignoring truncated last line {} of cache {}", lineno, path.string());
        } else {
          throw ParseError("corrupt cache record in " + path.string() + ": " + e.what(), lineno);
        }
      }
    }
  } else if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  out_.open(path, std::ios::app);
  if (!out_) throw Error("cannot open cache " + path.string() + " for appending");
}

std::optional<CacheRecord> AugmentationCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void AugmentationCache::append(const CacheRecord& record) {
  std::lock_guard lock(mutex_);
  if (out_.is_open()) {
    out_ << to_json(record).dump() << '\n';
    out_.flush();
  }
  records_[record.key()] = record;
}

std::size_t AugmentationCache::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace augrec
