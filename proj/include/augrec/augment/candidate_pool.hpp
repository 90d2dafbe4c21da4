#pragma once

#include <functional>
#include <string>
#include <vector>

#include "augrec/core.hpp"
#include "augrec/data/split.hpp"

namespace augrec {

// Per-user hard candidates C_u the language model chooses from.
struct CandidatePool {
  std::vector<std::vector<int>> candidates;  // user -> item indices, best first
  std::string source;                        // base scorer tag
  int pool_size = 0;

  const std::vector<int>& of(int user) const { return candidates.at(static_cast<std::size_t>(user)); }
  int num_users() const { return static_cast<int>(candidates.size()); }
};

// Fills `scores` (length num_items) for one user.
using ItemScorer = std::function<void(int user, Vector& scores)>;

// Top pool_size items per user by score after excluding the user's train items;
// ties go to the lower item index. Users with fewer eligible items get a shorter
// pool and a warning.
CandidatePool build_candidate_pool(const ItemScorer& scorer, const DatasetSplit& split, int num_users,
                                   int num_items, int pool_size, std::string source);

// Convenience for a dense (num_users x num_items) score matrix.
CandidatePool build_candidate_pool(const Matrix& scores, const DatasetSplit& split, int pool_size,
                                   std::string source);

}  // namespace augrec
