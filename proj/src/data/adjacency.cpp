#include "augrec/data/adjacency.hpp"

#include <cmath>

namespace augrec {

NormalizedAdjacency::NormalizedAdjacency(const std::vector<Edge>& train_edges, int num_users,
                                         int num_items)
    : num_users_(num_users), num_items_(num_items) {
  if (train_edges.empty()) throw DataError("cannot build adjacency from an empty train set");
  const int n = num_users + num_items;
  degree_.assign(static_cast<std::size_t>(n), 0);
  for (const Edge& e : train_edges) {
    if (e.user < 0 || e.user >= num_users || e.item < 0 || e.item >= num_items) {
      throw DataError("train edge out of range");
    }
    ++degree_[static_cast<std::size_t>(e.user)];
    ++degree_[static_cast<std::size_t>(item_node(e.item))];
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(train_edges.size() * 2);
  for (const Edge& e : train_edges) {
    const int i = item_node(e.item);
    const double w = 1.0 / std::sqrt(static_cast<double>(degree_[static_cast<std::size_t>(e.user)]) *
                                     static_cast<double>(degree_[static_cast<std::size_t>(i)]));
    entries.emplace_back(e.user, i, w);
    entries.emplace_back(i, e.user, w);
  }
  matrix_.resize(n, n);
  matrix_.setFromTriplets(entries.begin(), entries.end());
  matrix_.makeCompressed();
}

NormalizedAdjacency build_norm_adjacency(const DatasetSplit& split, const InteractionGraph& graph) {
  return NormalizedAdjacency(split.train, graph.num_users, graph.num_items);
}

}  // namespace augrec
