#include "augrec/train/losses.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

namespace augrec {

BprGradients bpr_gradients(double pos_score, double neg_score) {
  const double s = sigmoid(pos_score - neg_score);
  return {s - 1.0, 1.0 - s};
}

std::size_t retained_count(std::size_t batch_size, double prune_rate) {
  // The 1e-9 slack absorbs representation error, e.g. (1 - 0.3) * 10.
  const auto n = static_cast<std::size_t>(std::floor((1.0 - prune_rate) * static_cast<double>(batch_size) + 1e-9));
  if (n == 0) throw ConfigError("prune rate keeps no triplets of a batch of " + std::to_string(batch_size));
  return n;
}

std::vector<std::size_t> keep_smallest(std::span<const double> losses, std::size_t n) {
  std::vector<std::size_t> idx(losses.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  n = std::min(n, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                    [&](std::size_t a, std::size_t b) { return losses[a] < losses[b] || (losses[a] == losses[b] && a < b); });
  idx.resize(n);
  return idx;
}

PrunedBprLoss pruned_bpr_loss(std::span<const Triplet> batch, const Matrix& h, int num_users,
                              double prune_rate, double weight_decay, double squared_param_norm) {
  PrunedBprLoss out;
  out.per_triplet.reserve(batch.size());
  for (const Triplet& t : batch) {
    const auto u = h.row(t.user);
    out.per_triplet.push_back(triplet_loss(u.dot(h.row(num_users + t.pos)), u.dot(h.row(num_users + t.neg))));
  }
  out.kept = keep_smallest(out.per_triplet, retained_count(batch.size(), prune_rate));
  for (std::size_t k : out.kept) out.data_loss += out.per_triplet[k];
  out.regularization = weight_decay * squared_param_norm;
  return out;
}

MaskSelection select_masked_nodes(std::span<const int> eligible, double mask_rate, std::uint64_t seed) {
  if (mask_rate <= 0 || mask_rate >= 1) throw ConfigError("mask rate must be in (0, 1)");
  const auto count = static_cast<std::size_t>(std::floor(mask_rate * static_cast<double>(eligible.size())));
  if (count == 0) {
    throw ConfigError("mask rate " + std::to_string(mask_rate) + " masks no node out of " +
                      std::to_string(eligible.size()));
  }
  MaskSelection sel;
  sel.seed = seed;
  Rng rng(seed);
  std::sample(eligible.begin(), eligible.end(), std::back_inserter(sel.nodes), count, rng);
  std::sort(sel.nodes.begin(), sel.nodes.end());
  return sel;
}

double scaled_cosine_error(const RowVector& restored, const RowVector& original, double gamma) {
  const double nr = restored.norm();
  const double no = original.norm();
  const double cos = (nr > 0 && no > 0) ? restored.dot(original) / (nr * no) : 0.0;
  return std::pow(std::max(0.0, 1.0 - cos), gamma);
}

}  // namespace augrec
