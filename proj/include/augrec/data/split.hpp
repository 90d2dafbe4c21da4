#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "augrec/data/interaction_graph.hpp"

namespace augrec {

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;

  void validate() const;
};

// Disjoint partition of E+ into train/val/test edges.
struct DatasetSplit {
  std::vector<Edge> train;
  std::vector<Edge> val;
  std::vector<Edge> test;
  std::uint64_t seed = 0;

  bool operator==(const DatasetSplit&) const = default;
};

// Per-user shuffled ratio split. Users with fewer than three interactions keep
// all of them in train. Every user with val/test edges keeps at least one train edge.
DatasetSplit split_dataset(const InteractionGraph& graph, const SplitRatios& ratios,
                           std::uint64_t seed);

// JSON with raw ids: {"seed": n, "train": [[u, i], ...], "val": [...], "test": [...]}.
void save_split(const DatasetSplit& split, const InteractionGraph& graph,
                const std::filesystem::path& path);
DatasetSplit load_split(const std::filesystem::path& path, const InteractionGraph& graph);

}  // namespace augrec
