#include "augrec/data/interaction_graph.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace augrec {

int IdMap::intern(std::string_view raw) {
  auto it = index_.find(std::string(raw));
  if (it != index_.end()) return it->second;
  const int idx = static_cast<int>(raw_.size());
  raw_.emplace_back(raw);
  index_.emplace(raw_.back(), idx);
  return idx;
}

std::optional<int> IdMap::find(std::string_view raw) const {
  auto it = index_.find(std::string(raw));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void InteractionGraph::validate() const {
  if (users.size() != num_users || items.size() != num_items) {
    throw DataError("interaction graph: id map sizes disagree with counts");
  }
  std::set<Edge> seen;
  for (const Edge& e : edges) {
    if (e.user < 0 || e.user >= num_users || e.item < 0 || e.item >= num_items) {
      throw DataError("interaction graph: edge index out of range");
    }
    if (!seen.insert(e).second) throw DataError("interaction graph: duplicate edge");
  }
}

InteractionGraph parse_interactions(std::istream& in) {
  InteractionGraph graph;
  std::set<Edge> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string user, item, extra;
    if (!(fields >> user)) continue;  // blank line
    if (!(fields >> item) || (fields >> extra)) {
      throw ParseError("malformed interaction line, expected `user<TAB>item`", line_no);
    }
    const Edge e{graph.users.intern(user), graph.items.intern(item)};
    if (!seen.insert(e).second) {
      ++graph.duplicates_dropped;
      continue;
    }
    graph.edges.push_back(e);
  }
  if (graph.edges.empty()) throw DataError("interaction file contains no edges");
  graph.num_users = graph.users.size();
  graph.num_items = graph.items.size();
  if (graph.duplicates_dropped > 0) {
    spdlog::warn("dropped {} duplicate interaction(s)", graph.duplicates_dropped);
  }
  return graph;
}

InteractionGraph load_interactions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open interaction file " + path.string());
  return parse_interactions(in);
}

void write_interactions(const InteractionGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const Edge& e : graph.edges) {
    out << graph.users.raw(e.user) << '\t' << graph.items.raw(e.item) << '\n';
  }
}

std::vector<ItemMetadata> load_item_metadata(const std::filesystem::path& path,
                                             const InteractionGraph& graph) {
  std::vector<ItemMetadata> items(static_cast<std::size_t>(graph.num_items));
  for (int i = 0; i < graph.num_items; ++i) items[static_cast<std::size_t>(i)].title = graph.items.raw(i);
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open item metadata file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() < 2) throw ParseError("item metadata needs at least id and title", line_no);
    const auto idx = graph.items.find(cols[0]);
    if (!idx) continue;  // item without interactions
    ItemMetadata& m = items[static_cast<std::size_t>(*idx)];
    m.title = cols[1];
    if (cols.size() > 2) m.year = cols[2];
    if (cols.size() > 3) {
      std::stringstream gs(cols[3]);
      std::string g;
      while (std::getline(gs, g, '|')) {
        if (!g.empty()) m.genres.push_back(g);
      }
    }
  }
  return items;
}

void write_item_metadata(const std::vector<ItemMetadata>& items, const InteractionGraph& graph,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const ItemMetadata& m = items[i];
    out << graph.items.raw(static_cast<int>(i)) << '\t' << m.title << '\t' << m.year << '\t';
    for (std::size_t g = 0; g < m.genres.size(); ++g) out << (g ? "|" : "") << m.genres[g];
    out << '\n';
  }
}

std::vector<std::vector<int>> items_by_user(const std::vector<Edge>& edges, int num_users) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_users));
  for (const Edge& e : edges) out[static_cast<std::size_t>(e.user)].push_back(e.item);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

}  // namespace augrec
