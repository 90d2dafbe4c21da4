#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "augrec/data/interaction_graph.hpp"

namespace augrec {

enum class PromptKind { ui_edge, user_profile, item_attr };

std::string_view to_string(PromptKind kind);
PromptKind prompt_kind_from_string(std::string_view name);

inline constexpr std::array<std::string_view, 7> kProfileFields = {
    "age", "gender", "liked genre", "disliked genre", "liked directors", "country", "language"};
inline constexpr std::array<std::string_view, 3> kItemFields = {"director", "country", "language"};

std::span<const std::string_view> attribute_fields(PromptKind kind);

struct TextSpan {
  std::size_t begin = 0;
  std::size_t length = 0;
};

struct PromptRecord {
  PromptKind kind = PromptKind::ui_edge;
  int subject = 0;                         // user index, or item index for item_attr
  std::string text;
  std::map<std::string, TextSpan> sections;  // "task", "history", "candidates", "output_format"
  std::vector<int> candidates;             // global item indices in listed order (ui_edge)

  std::string_view section(const std::string& name) const;
};

// What prompts are rendered from: item descriptions and each user's train items.
struct PromptContext {
  const std::vector<ItemMetadata>* items = nullptr;
  const std::vector<std::vector<int>>* history = nullptr;
  std::size_t max_history = 50;
};

// "Title (year), Genre, Genre"
std::string describe_item(const ItemMetadata& item);

// Deterministic prompt text. ui_edge needs candidates; user prompts throw DataError
// for a user with no history.
PromptRecord build_prompt(PromptKind kind, int subject, const PromptContext& context,
                          std::span<const int> candidates = {});

}  // namespace augrec
