#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "augrec/core.hpp"

namespace augrec {

// Bijection between raw string ids and dense indices, assigned in first-seen order.
class IdMap {
 public:
  int intern(std::string_view raw);
  std::optional<int> find(std::string_view raw) const;
  const std::string& raw(int index) const { return raw_.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(raw_.size()); }
  bool operator==(const IdMap& other) const { return raw_ == other.raw_; }

 private:
  std::vector<std::string> raw_;
  std::unordered_map<std::string, int> index_;
};

// Users, items and the observed implicit-feedback edge set E+.
struct InteractionGraph {
  int num_users = 0;
  int num_items = 0;
  std::vector<Edge> edges;  // unique, in first-seen order
  IdMap users;
  IdMap items;
  std::size_t duplicates_dropped = 0;

  void validate() const;
};

// One `user<TAB>item` pair per line (any whitespace accepted). Blank lines are skipped.
InteractionGraph parse_interactions(std::istream& in);
InteractionGraph load_interactions(const std::filesystem::path& path);
void write_interactions(const InteractionGraph& graph, const std::filesystem::path& path);

// Textual description of an item used when rendering prompts.
struct ItemMetadata {
  std::string title;
  std::string year;
  std::vector<std::string> genres;
};

// TSV: item_id, title, year, genres separated by '|'. Items absent from the file
// get their raw id as title.
std::vector<ItemMetadata> load_item_metadata(const std::filesystem::path& path,
                                             const InteractionGraph& graph);
void write_item_metadata(const std::vector<ItemMetadata>& items, const InteractionGraph& graph,
                         const std::filesystem::path& path);

// Sorted item lists per user.
std::vector<std::vector<int>> items_by_user(const std::vector<Edge>& edges, int num_users);

}  // namespace augrec
