#pragma once

#include <span>
#include <vector>

namespace augrec {

struct TopKMetrics {
  double recall = 0.0;
  double ndcg = 0.0;
  double precision = 0.0;

  bool operator==(const TopKMetrics&) const = default;
};

// Binary-relevance top-K metrics. `relevant` must be sorted and non-empty.
//   recall    = |top-K ∩ relevant| / |relevant|
//   precision = |top-K ∩ relevant| / K
//   ndcg      = DCG / IDCG, DCG = sum over hits at 1-based rank r of 1 / log2(r + 1),
//               IDCG over min(K, |relevant|) ideal hits.
// If `ranked` holds fewer than K items, only those are considered (precision still divides by K).
TopKMetrics compute_metrics(std::span<const int> ranked, std::span<const int> relevant, int k);

}  // namespace augrec
