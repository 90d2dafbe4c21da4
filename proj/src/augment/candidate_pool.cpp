#include "augrec/augment/candidate_pool.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <numeric>

#include "augrec/data/interaction_graph.hpp"

namespace augrec {

CandidatePool build_candidate_pool(const ItemScorer& scorer, const DatasetSplit& split, int num_users,
                                   int num_items, int pool_size, std::string source) {
  if (pool_size < 2) throw ConfigError("candidate pool size must be >= 2");
  const auto train_items = items_by_user(split.train, num_users);

  CandidatePool pool;
  pool.source = std::move(source);
  pool.pool_size = pool_size;
  pool.candidates.resize(static_cast<std::size_t>(num_users));

  Vector scores(num_items);
  std::vector<int> order;
  int shrunk = 0;
  for (int u = 0; u < num_users; ++u) {
    scores.setZero();
    scorer(u, scores);
    if (scores.size() != num_items) throw DataError("scorer returned the wrong number of item scores");
    const auto& seen = train_items[static_cast<std::size_t>(u)];
    order.clear();
    for (int i = 0; i < num_items; ++i) {
      if (!std::binary_search(seen.begin(), seen.end(), i)) order.push_back(i);
    }
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(pool_size), order.size());
    if (take < static_cast<std::size_t>(pool_size)) ++shrunk;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](int a, int b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
    pool.candidates[static_cast<std::size_t>(u)].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  }
  if (shrunk > 0) {
    spdlog::warn("{} users have fewer than {} non-interacted items; their candidate pools were shrunk", shrunk,
                 pool_size);
  }
  return pool;
}

CandidatePool build_candidate_pool(const Matrix& scores, const DatasetSplit& split, int pool_size,
                                   std::string source) {
  const auto scorer = [&](int user, Vector& out) { out = scores.row(user).transpose(); };
  return build_candidate_pool(scorer, split, static_cast<int>(scores.rows()), static_cast<int>(scores.cols()),
                              pool_size, std::move(source));
}

}  // namespace augrec
