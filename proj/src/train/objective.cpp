#include "augrec/train/objective.hpp"

#include <algorithm>
#include <cmath>

namespace augrec {

namespace {

constexpr Modality kAugmentedModalities[] = {Modality::aug_user, Modality::aug_item};

bool has_augmented(const ModelState& state, const FeatureBank& bank, Modality m) {
  return bank.has(m) && state.projections.count(m) != 0;
}

}  // namespace

ObjectiveSettings ObjectiveSettings::from(const TrainConfig& config) {
  ObjectiveSettings s;
  s.omega1 = config.incorporation_scale;
  s.weight_decay = config.weight_decay;
  s.prune_rate = config.prune_rate;
  s.fr_gamma = config.fr_gamma;
  s.fr_weight = config.fr_weight;
  return s;
}

std::vector<int> maskable_nodes(const ModelState& state, const FeatureBank& bank) {
  std::vector<int> nodes;
  if (has_augmented(state, bank, Modality::aug_user)) {
    for (int u = 0; u < state.num_users(); ++u) nodes.push_back(u);
  }
  if (has_augmented(state, bank, Modality::aug_item)) {
    for (int i = 0; i < state.num_items(); ++i) nodes.push_back(state.num_users() + i);
  }
  return nodes;
}

double restoration_loss(const ModelState& state, const FeatureBank& bank, const NormalizedAdjacency& adj,
                        const MaskSelection& mask, double gamma, ModelState* grad, double weight) {
  if (mask.nodes.empty()) return 0.0;
  const int nu = state.num_users();
  const int ni = state.num_items();
  const int layers = state.hp.num_layers;
  const double count = static_cast<double>(mask.nodes.size());
  double total = 0.0;

  for (Modality m : kAugmentedModalities) {
    if (!has_augmented(state, bank, m)) continue;
    const bool user_side = is_user_side(m);
    std::vector<int> rows;
    for (int node : mask.nodes) {
      if (user_side && node < nu) rows.push_back(node);
      if (!user_side && node >= nu) rows.push_back(node - nu);
    }
    if (rows.empty()) continue;

    const Matrix& original = bank.at(m);
    Matrix masked_input = original;
    for (int r : rows) masked_input.row(r) = state.mask_token;
    const Projection& proj = state.projections.at(m);
    Matrix projected = masked_input * proj.weight;
    projected.rowwise() += proj.bias;
    const Matrix context = propagate(adj, place_on_nodes(projected, m, nu, ni), layers);

    Matrix grad_context;
    if (grad) grad_context = Matrix::Zero(context.rows(), context.cols());
    for (int r : rows) {
      const int node = user_side ? r : nu + r;
      const RowVector z = context.row(node);
      const RowVector restored = z * state.decoder_weight + state.decoder_bias;
      const RowVector target = original.row(r);
      total += scaled_cosine_error(restored, target, gamma);
      if (!grad) continue;
      const double nr = restored.norm();
      const double nt = target.norm();
      if (nr == 0.0 || nt == 0.0) continue;  // guarded cosine is constant there
      const double cos = restored.dot(target) / (nr * nt);
      const double slope = -gamma * std::pow(std::max(0.0, 1.0 - cos), gamma - 1.0);
      const RowVector dcos = target / (nr * nt) - cos * restored / (nr * nr);
      const RowVector g_restored = (weight / count) * slope * dcos;
      grad->decoder_weight.noalias() += z.transpose() * g_restored;
      grad->decoder_bias += g_restored;
      grad_context.row(node).noalias() += g_restored * state.decoder_weight.transpose();
    }
    if (!grad) continue;
    const Matrix g_proj = take_side_rows(propagate(adj, grad_context, layers), m, nu, ni);
    Projection& gp = grad->projections.at(m);
    gp.weight.noalias() += masked_input.transpose() * g_proj;
    gp.bias += g_proj.colwise().sum();
    for (int r : rows) grad->mask_token.noalias() += g_proj.row(r) * proj.weight.transpose();
  }
  return total / count;
}

RestorationResult mask_and_restore_loss(const ModelState& state, const FeatureBank& bank,
                                        const NormalizedAdjacency& adj, double mask_rate, double gamma, Rng& rng) {
  const auto eligible = maskable_nodes(state, bank);
  if (eligible.empty()) throw DataError("no augmented features to mask");
  RestorationResult out;
  out.selection = select_masked_nodes(eligible, mask_rate, rng());
  out.loss = restoration_loss(state, bank, adj, out.selection, gamma);
  return out;
}

ObjectiveValue evaluate_objective(const ModelState& state, const FeatureBank& bank, const NormalizedAdjacency& adj,
                                  std::span<const Triplet> batch, const MaskSelection* mask,
                                  const ObjectiveSettings& settings, ModelState* grad, bool l2_in_gradient) {
  const int nu = state.num_users();
  const EncodeOptions enc{settings.omega1, settings.training, settings.dropout_seed};
  const EncoderPass pass = encode(state, bank, adj, enc);
  const PrunedBprLoss bpr =
      pruned_bpr_loss(batch, pass.h, nu, settings.prune_rate, settings.weight_decay, state.squared_norm());

  ObjectiveValue value;
  value.bpr_data = bpr.data_loss;
  value.regularization = bpr.regularization;
  value.kept = bpr.kept.size();
  value.pruned = batch.size() - bpr.kept.size();
  value.kept_indices = bpr.kept;

  if (grad) *grad = state.zeros_like();
  if (settings.fr_weight > 0.0 && mask && !mask->nodes.empty()) {
    value.fr = restoration_loss(state, bank, adj, *mask, settings.fr_gamma, grad, settings.fr_weight);
  }
  value.total = value.bpr_data + value.regularization + settings.fr_weight * value.fr;
  if (!grad) return value;

  Matrix grad_h = Matrix::Zero(pass.h.rows(), pass.h.cols());
  for (std::size_t k : bpr.kept) {
    const Triplet& t = batch[k];
    const auto hu = pass.h.row(t.user);
    const auto hp = pass.h.row(nu + t.pos);
    const auto hn = pass.h.row(nu + t.neg);
    const BprGradients g = bpr_gradients(hu.dot(hp), hu.dot(hn));
    grad_h.row(t.user) += g.positive * hp + g.negative * hn;
    grad_h.row(nu + t.pos) += g.positive * hu;
    grad_h.row(nu + t.neg) += g.negative * hu;
  }
  encode_backward(pass, state, bank, adj, enc, grad_h, *grad);

  if (l2_in_gradient && settings.weight_decay > 0.0) {
    auto params = state.parameters();
    auto grads = grad->parameters();
    for (std::size_t t = 0; t < params.size(); ++t) {
      for (std::size_t i = 0; i < params[t].size; ++i) {
        grads[t].data[i] += 2.0 * settings.weight_decay * params[t].data[i];
      }
    }
  }
  return value;
}

}  // namespace augrec
