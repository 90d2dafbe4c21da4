#include "augrec/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace augrec {

TopKMetrics compute_metrics(std::span<const int> ranked, std::span<const int> relevant, int k) {
  if (k <= 0) throw std::invalid_argument("K must be positive");
  if (relevant.empty()) throw std::invalid_argument("relevant set must be non-empty");
  const std::size_t depth = std::min(ranked.size(), static_cast<std::size_t>(k));
  int hits = 0;
  double dcg = 0.0;
  for (std::size_t r = 0; r < depth; ++r) {
    if (std::binary_search(relevant.begin(), relevant.end(), ranked[r])) {
      ++hits;
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
  }
  const std::size_t ideal = std::min(relevant.size(), static_cast<std::size_t>(k));
  double idcg = 0.0;
  for (std::size_t r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  TopKMetrics m;
  m.recall = static_cast<double>(hits) / static_cast<double>(relevant.size());
  m.precision = static_cast<double>(hits) / static_cast<double>(k);
  m.ndcg = dcg / idcg;
  return m;
}

}  // namespace augrec
