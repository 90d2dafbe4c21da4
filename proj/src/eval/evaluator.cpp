#include "augrec/eval/evaluator.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <thread>

namespace augrec {

namespace {

constexpr int kUserBlock = 256;

struct Protocol {
  std::vector<std::vector<int>> masked;    // sorted per user
  std::vector<std::vector<int>> relevant;  // sorted per user
  int depth = 0;
};

Protocol make_protocol(int num_users, int num_items, const DatasetSplit& split, const EvalOptions& options) {
  if (options.ks.empty()) throw ConfigError("evaluation needs at least one K");
  for (int k : options.ks) {
    if (k <= 0) throw ConfigError("evaluation K must be positive");
  }
  Protocol p;
  p.masked = items_by_user(split.train, num_users);
  if (options.target == EvalTarget::test) {
    const auto val = items_by_user(split.val, num_users);
    for (int u = 0; u < num_users; ++u) {
      auto& m = p.masked[static_cast<std::size_t>(u)];
      m.insert(m.end(), val[static_cast<std::size_t>(u)].begin(), val[static_cast<std::size_t>(u)].end());
      std::sort(m.begin(), m.end());
    }
  }
  p.relevant = items_by_user(options.target == EvalTarget::test ? split.test : split.val, num_users);
  p.depth = std::min(*std::max_element(options.ks.begin(), options.ks.end()), num_items);
  return p;
}

std::optional<UserEvaluation> evaluate_user(int u, const Vector& scores, const Protocol& p,
                                            const EvalOptions& options) {
  const auto& relevant = p.relevant[static_cast<std::size_t>(u)];
  if (relevant.empty()) return std::nullopt;
  const auto ranked = rank_items(scores, p.masked[static_cast<std::size_t>(u)], p.depth);
  UserEvaluation out;
  out.user = u;
  for (int k : options.ks) out.at[k] = compute_metrics(ranked, relevant, k);
  return out;
}

EvalReport reduce(std::vector<std::optional<UserEvaluation>>&& results, const EvalOptions& options) {
  EvalReport report;
  report.ks = options.ks;
  std::map<int, TopKMetrics> sum;
  for (int k : options.ks) sum[k] = {};
  for (auto& r : results) {
    if (!r) continue;
    ++report.num_evaluable_users;
    for (int k : options.ks) {
      sum[k].recall += r->at[k].recall;
      sum[k].ndcg += r->at[k].ndcg;
      sum[k].precision += r->at[k].precision;
    }
    if (options.keep_per_user) report.per_user.push_back(std::move(*r));
  }
  if (report.num_evaluable_users == 0) throw DataError("no evaluable users (empty target split)");
  const double n = report.num_evaluable_users;
  for (int k : options.ks) {
    report.mean[k] = {sum[k].recall / n, sum[k].ndcg / n, sum[k].precision / n};
  }
  return report;
}

// Runs body(begin, end) over user blocks, optionally on several threads.
template <typename Body>
void for_user_blocks(int num_users, int threads, Body&& body) {
  const int blocks = (num_users + kUserBlock - 1) / kUserBlock;
  auto worker = [&](int first_block, int stride) {
    for (int b = first_block; b < blocks; b += stride) {
      body(b * kUserBlock, std::min(num_users, (b + 1) * kUserBlock));
    }
  };
  const int n = std::max(1, std::min(threads, blocks));
  if (n == 1) {
    worker(0, 1);
    return;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(worker, t, n);
}

}  // namespace

std::vector<int> rank_items(const Vector& scores, const std::vector<int>& masked, int depth) {
  std::vector<int> candidates;
  candidates.reserve(static_cast<std::size_t>(scores.size()));
  auto mask_it = masked.begin();
  for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
    while (mask_it != masked.end() && *mask_it < i) ++mask_it;
    if (mask_it != masked.end() && *mask_it == i) continue;
    candidates.push_back(i);
  }
  const auto keep = std::min(candidates.size(), static_cast<std::size_t>(std::max(depth, 0)));
  auto better = [&](int a, int b) {
    return scores(a) > scores(b) || (scores(a) == scores(b) && a < b);
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                    better);
  candidates.resize(keep);
  return candidates;
}

EvalReport evaluate_all_ranking(const UserScorer& scorer, int num_users, int num_items,
                                const DatasetSplit& split, const EvalOptions& options) {
  const Protocol p = make_protocol(num_users, num_items, split, options);
  std::vector<std::optional<UserEvaluation>> results(static_cast<std::size_t>(num_users));
  for_user_blocks(num_users, options.threads, [&](int begin, int end) {
    Vector scores(num_items);
    for (int u = begin; u < end; ++u) {
      if (p.relevant[static_cast<std::size_t>(u)].empty()) continue;
      scores.setZero();
      scorer(u, scores);
      results[static_cast<std::size_t>(u)] = evaluate_user(u, scores, p, options);
    }
  });
  return reduce(std::move(results), options);
}

EvalReport evaluate_all_ranking(const Matrix& h, int num_users, const DatasetSplit& split,
                                const EvalOptions& options) {
  const int num_items = static_cast<int>(h.rows()) - num_users;
  if (num_items <= 0) throw DataError("representation matrix has no item rows");
  const Protocol p = make_protocol(num_users, num_items, split, options);
  const auto items = h.bottomRows(num_items);
  std::vector<std::optional<UserEvaluation>> results(static_cast<std::size_t>(num_users));
  for_user_blocks(num_users, options.threads, [&](int begin, int end) {
    const Matrix block = h.middleRows(begin, end - begin) * items.transpose();
    for (int u = begin; u < end; ++u) {
      const Vector scores = block.row(u - begin).transpose();
      results[static_cast<std::size_t>(u)] = evaluate_user(u, scores, p, options);
    }
  });
  return reduce(std::move(results), options);
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, m] : report.mean) {
    j[std::to_string(k)] = {{"recall", m.recall}, {"ndcg", m.ndcg}, {"precision", m.precision}};
  }
  j["num_evaluable_users"] = report.num_evaluable_users;
  return j;
}

}  // namespace augrec
