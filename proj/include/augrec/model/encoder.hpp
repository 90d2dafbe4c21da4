#pragma once

#include <cstdint>
#include <map>

#include "augrec/core.hpp"
#include "augrec/data/adjacency.hpp"
#include "augrec/data/feature_bank.hpp"
#include "augrec/model/model_state.hpp"

namespace augrec {

// Light-weight graph propagation: mean over l = 0..L of A^l x. No self loops,
// no per-layer transforms. The operator is symmetric, so it is its own adjoint.
Matrix propagate(const NormalizedAdjacency& adj, const Matrix& x, int num_layers);

// Per-modality projected features, rows aligned to the owning side.
struct ProjectedFeatures {
  std::map<Modality, Matrix> values;
  std::map<Modality, Matrix> dropout_masks;  // inverted-dropout scale per entry; absent when inactive
};

// dropout(x * W + b); dropout only when training. Masks depend only on (seed, modality).
ProjectedFeatures project_features(const FeatureBank& bank, const ModelState& state, bool training,
                                   std::uint64_t seed);

// Scatters side-aligned rows into a (num_users + num_items) x cols node matrix.
Matrix place_on_nodes(const Matrix& rows, Modality m, int num_users, int num_items);
// Inverse of place_on_nodes: the rows belonging to the modality's side.
Matrix take_side_rows(const Matrix& nodes, Modality m, int num_users, int num_items);

// Row-wise L2 normalization; zero rows stay zero.
Matrix normalize_rows(const Matrix& x);
// Vector-Jacobian product of normalize_rows at x.
Matrix normalize_rows_backward(const Matrix& x, const Matrix& grad_out);

// h = e + omega1 * sum_k f_k / ||f_k||, all rows aligned.
Matrix incorporate(const Matrix& collab, const std::vector<const Matrix*>& features, double omega1);

// Scores of one user against every item: h_u . h_i.
Vector score_all(int user, const Matrix& h, int num_users);

// Everything the backward pass needs from one forward evaluation.
struct EncoderPass {
  Matrix collab;                         // propagate([E_u; E_i])
  ProjectedFeatures projected;
  std::map<Modality, Matrix> context;    // propagated per-modality node features
  Matrix h;                              // final representations, users then items
};

struct EncodeOptions {
  double omega1 = 0.0;  // feature incorporation scale; 0 skips the feature path entirely
  bool training = false;
  std::uint64_t dropout_seed = 0;
};

EncoderPass encode(const ModelState& state, const FeatureBank& bank, const NormalizedAdjacency& adj,
                   const EncodeOptions& options);

// Accumulates dLoss/dTheta into `grad` given dLoss/dh.
void encode_backward(const EncoderPass& pass, const ModelState& state, const FeatureBank& bank,
                     const NormalizedAdjacency& adj, const EncodeOptions& options, const Matrix& grad_h,
                     ModelState& grad);

}  // namespace augrec
