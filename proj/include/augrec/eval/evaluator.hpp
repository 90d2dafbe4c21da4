#pragma once

#include <functional>
#include <map>
#include <vector>

#include "json.hpp"

#include "augrec/core.hpp"
#include "augrec/data/split.hpp"
#include "augrec/eval/metrics.hpp"

namespace augrec {

enum class EvalTarget { validation, test };

struct UserEvaluation {
  int user = 0;
  std::map<int, TopKMetrics> at;
};

struct EvalReport {
  std::vector<int> ks;
  std::map<int, TopKMetrics> mean;  // K -> mean over evaluable users
  int num_evaluable_users = 0;
  std::vector<UserEvaluation> per_user;  // filled when requested

  double recall(int k) const { return mean.at(k).recall; }
  double ndcg(int k) const { return mean.at(k).ndcg; }
  double precision(int k) const { return mean.at(k).precision; }
};

struct EvalOptions {
  EvalTarget target = EvalTarget::test;
  std::vector<int> ks = {10, 20, 50};
  bool keep_per_user = false;
  int threads = 1;
};

// Fills `scores` (length num_items) for one user.
using UserScorer = std::function<void(int user, Vector& scores)>;

// All-ranking protocol: every item except the user's train items (and val items
// when evaluating on test) is ranked; ties go to the lower item index. Users with
// no target items are skipped; throws DataError when none remain.
EvalReport evaluate_all_ranking(const UserScorer& scorer, int num_users, int num_items,
                                const DatasetSplit& split, const EvalOptions& options);

// Same protocol with inner-product scores from final representations
// (users in rows [0, num_users), items after), computed in blocked matrix products.
EvalReport evaluate_all_ranking(const Matrix& h, int num_users, const DatasetSplit& split,
                                const EvalOptions& options);

// Top `depth` unmasked items by descending score. `masked` must be sorted.
std::vector<int> rank_items(const Vector& scores, const std::vector<int>& masked, int depth);

// {"10": {"recall", "ndcg", "precision"}, ..., "num_evaluable_users": n}
nlohmann::json to_json(const EvalReport& report);

}  // namespace augrec
