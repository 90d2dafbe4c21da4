#pragma once

#include <vector>

#include "augrec/core.hpp"
#include "augrec/data/interaction_graph.hpp"
#include "augrec/data/split.hpp"

namespace augrec {

// Symmetrically degree-normalized adjacency over the user+item bipartite graph.
// Node order: users [0, num_users), then items [num_users, num_users + num_items).
// Entry (u, i) = 1 / sqrt(deg(u) * deg(i)) for every train edge; isolated nodes keep
// all-zero rows.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency(const std::vector<Edge>& train_edges, int num_users, int num_items);

  const SparseMatrix& matrix() const { return matrix_; }
  int num_users() const { return num_users_; }
  int num_items() const { return num_items_; }
  int num_nodes() const { return num_users_ + num_items_; }
  int item_node(int item) const { return num_users_ + item; }
  const std::vector<int>& degrees() const { return degree_; }

 private:
  int num_users_;
  int num_items_;
  std::vector<int> degree_;
  SparseMatrix matrix_;
};

NormalizedAdjacency build_norm_adjacency(const DatasetSplit& split, const InteractionGraph& graph);

}  // namespace augrec
