#include "augrec/data/split.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace augrec {

namespace {

constexpr int kMinInteractionsForHoldout = 3;

int holdout_count(double ratio, std::size_t n) {
  if (ratio <= 0.0) return 0;
  return std::max(1, static_cast<int>(std::lround(ratio * static_cast<double>(n))));
}

nlohmann::json edges_to_json(const std::vector<Edge>& edges, const InteractionGraph& graph) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Edge& e : edges) arr.push_back({graph.users.raw(e.user), graph.items.raw(e.item)});
  return arr;
}

std::vector<Edge> edges_from_json(const nlohmann::json& arr, const InteractionGraph& graph) {
  std::vector<Edge> out;
  out.reserve(arr.size());
  for (const auto& pair : arr) {
    const auto u = graph.users.find(pair.at(0).get<std::string>());
    const auto i = graph.items.find(pair.at(1).get<std::string>());
    if (!u || !i) throw DataError("split file references an unknown user or item");
    out.push_back({*u, *i});
  }
  return out;
}

}  // namespace

void SplitRatios::validate() const {
  if (train < 0 || val < 0 || test < 0) throw ConfigError("split ratios must be non-negative");
  if (std::abs(train + val + test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

DatasetSplit split_dataset(const InteractionGraph& graph, const SplitRatios& ratios,
                           std::uint64_t seed) {
  ratios.validate();
  DatasetSplit split;
  split.seed = seed;
  Rng rng(seed);
  const auto per_user = items_by_user(graph.edges, graph.num_users);
  for (int u = 0; u < graph.num_users; ++u) {
    std::vector<int> items = per_user[static_cast<std::size_t>(u)];
    std::shuffle(items.begin(), items.end(), rng);
    const std::size_t n = items.size();
    int n_val = 0;
    int n_test = 0;
    if (n >= static_cast<std::size_t>(kMinInteractionsForHoldout)) {
      n_val = holdout_count(ratios.val, n);
      n_test = holdout_count(ratios.test, n);
      while (n_val + n_test >= static_cast<int>(n)) {
        if (n_test >= n_val && n_test > 0) {
          --n_test;
        } else {
          --n_val;
        }
      }
    }
    const auto n_train = n - static_cast<std::size_t>(n_val + n_test);
    auto emit = [&](std::vector<Edge>& dst, std::size_t begin, std::size_t end) {
      std::vector<int> part(items.begin() + static_cast<std::ptrdiff_t>(begin),
                            items.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(part.begin(), part.end());
      for (int i : part) dst.push_back({u, i});
    };
    emit(split.train, 0, n_train);
    emit(split.val, n_train, n_train + static_cast<std::size_t>(n_val));
    emit(split.test, n_train + static_cast<std::size_t>(n_val), n);
  }
  return split;
}

void save_split(const DatasetSplit& split, const InteractionGraph& graph,
                const std::filesystem::path& path) {
  nlohmann::json j;
  j["seed"] = split.seed;
  j["train"] = edges_to_json(split.train, graph);
  j["val"] = edges_to_json(split.val, graph);
  j["test"] = edges_to_json(split.test, graph);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump() << '\n';
}

DatasetSplit load_split(const std::filesystem::path& path, const InteractionGraph& graph) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open split file " + path.string());
  const auto j = nlohmann::json::parse(in);
  DatasetSplit split;
  split.seed = j.at("seed").get<std::uint64_t>();
  split.train = edges_from_json(j.at("train"), graph);
  split.val = edges_from_json(j.at("val"), graph);
  split.test = edges_from_json(j.at("test"), graph);
  return split;
}

}  // namespace augrec
