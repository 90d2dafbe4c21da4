#include "augrec/augment/response_parser.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace augrec {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n*`\"'");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n*`\"'");
  return std::string(s.substr(first, last - first + 1));
}

long find_index(const std::string& text, const std::regex& re, const char* label) {
  std::smatch m;
  if (!std::regex_search(text, m, re)) throw ResponseError(std::string("response has no ") + label + " line");
  return std::stol(m[1].str());
}

}  // namespace

EdgeChoice parse_edge_response(std::string_view text, std::span<const int> candidates) {
  if (text.empty()) throw ResponseError("empty response");
  static const std::regex pos_re(R"(\bpos(?:itive)?\s*[:=]\s*\[?\s*(-?\d+))", std::regex::icase);
  static const std::regex neg_re(R"(\bneg(?:ative)?\s*[:=]\s*\[?\s*(-?\d+))", std::regex::icase);
  const std::string body(text);
  const long pos = find_index(body, pos_re, "POS");
  const long neg = find_index(body, neg_re, "NEG");
  const auto listed = candidates.size();
  for (long idx : {pos, neg}) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= listed) throw UnlistedCandidate(idx, listed);
  }
  if (pos == neg) throw ResponseError("POS and NEG name the same candidate " + std::to_string(pos));
  EdgeChoice choice;
  choice.pos_index = static_cast<int>(pos);
  choice.neg_index = static_cast<int>(neg);
  choice.pos_item = candidates[static_cast<std::size_t>(pos)];
  choice.neg_item = candidates[static_cast<std::size_t>(neg)];
  return choice;
}

AttributeRecord parse_attribute_response(PromptKind kind, std::string_view text) {
  const auto fields = attribute_fields(kind);
  if (fields.empty()) throw ConfigError("prompt kind has no attribute fields");
  if (text.empty()) throw ResponseError("empty response");
  AttributeRecord record;
  for (std::string_view f : fields) record[std::string(f)] = std::string(kMissingField);

  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    std::string key = lower(trim(line.substr(0, colon)));
    if (key.rfind("- ", 0) == 0) key = trim(key.substr(2));
    const auto it = record.find(key);
    if (it == record.end() || !it->second.empty()) continue;
    it->second = trim(line.substr(colon + 1));
  }
  return record;
}

std::string render_attributes(PromptKind kind, const AttributeRecord& record) {
  std::string out;
  for (std::string_view f : attribute_fields(kind)) {
    const auto it = record.find(std::string(f));
    if (!out.empty()) out += '\n';
    out += std::string(f) + ": " + (it == record.end() ? std::string(kMissingField) : it->second);
  }
  return out;
}

}  // namespace augrec
