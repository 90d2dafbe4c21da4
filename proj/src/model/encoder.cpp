#include "augrec/model/encoder.hpp"

#include <string>

namespace augrec {

Matrix propagate(const NormalizedAdjacency& adj, const Matrix& x, int num_layers) {
  if (num_layers < 0) throw ConfigError("number of propagation layers must be >= 0");
  if (x.rows() != adj.num_nodes()) throw DataError("propagate: row count does not match the graph");
  Matrix acc = x;
  Matrix layer = x;
  for (int l = 0; l < num_layers; ++l) {
    layer = adj.matrix() * layer;
    acc += layer;
  }
  acc /= static_cast<double>(num_layers + 1);
  return acc;
}

ProjectedFeatures project_features(const FeatureBank& bank, const ModelState& state, bool training,
                                   std::uint64_t seed) {
  ProjectedFeatures out;
  const double rate = state.hp.dropout;
  for (const auto& [m, proj] : state.projections) {
    const Matrix& f = bank.at(m);
    if (f.cols() != proj.weight.rows()) {
      throw ConfigError(std::string(to_string(m)) + " features have dim " + std::to_string(f.cols()) +
                        ", projection expects " + std::to_string(proj.weight.rows()));
    }
    Matrix y = f * proj.weight;
    y.rowwise() += proj.bias;
    if (training && rate > 0.0) {
      Rng rng(derive_seed(seed, "dropout/" + std::string(to_string(m))));
      std::bernoulli_distribution keep(1.0 - rate);
      const double scale = 1.0 / (1.0 - rate);
      Matrix mask(y.rows(), y.cols());
      for (Eigen::Index r = 0; r < mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < mask.cols(); ++c) mask(r, c) = keep(rng) ? scale : 0.0;
      }
      y.array() *= mask.array();
      out.dropout_masks.emplace(m, std::move(mask));
    }
    out.values.emplace(m, std::move(y));
  }
  return out;
}

Matrix place_on_nodes(const Matrix& rows, Modality m, int num_users, int num_items) {
  Matrix nodes = Matrix::Zero(num_users + num_items, rows.cols());
  if (is_user_side(m)) {
    nodes.topRows(num_users) = rows;
  } else {
    nodes.bottomRows(num_items) = rows;
  }
  return nodes;
}

Matrix take_side_rows(const Matrix& nodes, Modality m, int num_users, int num_items) {
  return is_user_side(m) ? Matrix(nodes.topRows(num_users)) : Matrix(nodes.bottomRows(num_items));
}

Matrix normalize_rows(const Matrix& x) {
  Matrix out = x;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double n = x.row(r).norm();
    if (n > 0.0) {
      out.row(r) /= n;
    } else {
      out.row(r).setZero();
    }
  }
  return out;
}

Matrix normalize_rows_backward(const Matrix& x, const Matrix& grad_out) {
  Matrix g = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double n = x.row(r).norm();
    if (n == 0.0) continue;
    const RowVector unit = x.row(r) / n;
    g.row(r) = (grad_out.row(r) - grad_out.row(r).dot(unit) * unit) / n;
  }
  return g;
}

Matrix incorporate(const Matrix& collab, const std::vector<const Matrix*>& features, double omega1) {
  Matrix h = collab;
  if (omega1 == 0.0) return h;
  for (const Matrix* f : features) {
    if (f->rows() != collab.rows() || f->cols() != collab.cols()) {
      throw DataError("incorporate: feature rows are not aligned with the embeddings");
    }
    h += omega1 * normalize_rows(*f);
  }
  return h;
}

Vector score_all(int user, const Matrix& h, int num_users) {
  const Eigen::Index num_items = h.rows() - num_users;
  return h.bottomRows(num_items) * h.row(user).transpose();
}

EncoderPass encode(const ModelState& state, const FeatureBank& bank, const NormalizedAdjacency& adj,
                   const EncodeOptions& options) {
  const int nu = state.num_users();
  const int ni = state.num_items();
  if (nu != adj.num_users() || ni != adj.num_items()) throw DataError("model and graph sizes differ");
  EncoderPass pass;
  Matrix base(nu + ni, state.hp.dim);
  base.topRows(nu) = state.user_embedding;
  base.bottomRows(ni) = state.item_embedding;
  pass.collab = propagate(adj, base, state.hp.num_layers);
  if (options.omega1 == 0.0 || state.projections.empty()) {
    pass.h = pass.collab;
    return pass;
  }
  pass.projected = project_features(bank, state, options.training, options.dropout_seed);
  std::vector<const Matrix*> features;
  for (const auto& [m, values] : pass.projected.values) {
    auto [it, _] = pass.context.emplace(m, propagate(adj, place_on_nodes(values, m, nu, ni), state.hp.num_layers));
    features.push_back(&it->second);
  }
  pass.h = incorporate(pass.collab, features, options.omega1);
  return pass;
}

void encode_backward(const EncoderPass& pass, const ModelState& state, const FeatureBank& bank,
                     const NormalizedAdjacency& adj, const EncodeOptions& options, const Matrix& grad_h,
                     ModelState& grad) {
  const int nu = state.num_users();
  const int ni = state.num_items();
  const int layers = state.hp.num_layers;
  const Matrix grad_base = propagate(adj, grad_h, layers);
  grad.user_embedding += grad_base.topRows(nu);
  grad.item_embedding += grad_base.bottomRows(ni);
  if (pass.context.empty()) return;

  const Matrix scaled = options.omega1 * grad_h;
  for (const auto& [m, ctx] : pass.context) {
    const Matrix grad_ctx = normalize_rows_backward(ctx, scaled);
    Matrix grad_proj = take_side_rows(propagate(adj, grad_ctx, layers), m, nu, ni);
    if (auto it = pass.projected.dropout_masks.find(m); it != pass.projected.dropout_masks.end()) {
      grad_proj.array() *= it->second.array();
    }
    Projection& g = grad.projections.at(m);
    g.weight.noalias() += bank.at(m).transpose() * grad_proj;
    g.bias += grad_proj.colwise().sum();
  }
}

}  // namespace augrec
