#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "augrec/core.hpp"
#include "augrec/data/feature_bank.hpp"

namespace augrec {

struct HyperParams {
  int dim = 64;                  // embedding size d
  int llm_dim = kAugmentedDim;   // width of augmented features and the mask token
  int num_layers = 2;            // GNN depth L
  double dropout = 0.1;          // projection dropout

  void validate() const;
  bool operator==(const HyperParams&) const = default;
};

// Linear layer x * weight + bias, weight is (d_in x d).
struct Projection {
  Matrix weight;
  RowVector bias;
};

template <typename T>
struct BasicParameterView {
  std::string name;
  T* data = nullptr;
  std::size_t size = 0;
  std::vector<std::int64_t> shape;
};
using ParameterView = BasicParameterView<double>;
using ConstParameterView = BasicParameterView<const double>;

// All learnable parameters.
struct ModelState {
  HyperParams hp;
  Matrix user_embedding;  // num_users x d
  Matrix item_embedding;  // num_items x d
  std::map<Modality, Projection> projections;
  RowVector mask_token;     // llm_dim
  Matrix decoder_weight;    // d x llm_dim
  RowVector decoder_bias;   // llm_dim

  int num_users() const { return static_cast<int>(user_embedding.rows()); }
  int num_items() const { return static_cast<int>(item_embedding.rows()); }

  std::size_t parameter_count() const;
  bool all_finite() const;
  double squared_norm() const;

  // Same shapes, all zeros (used for gradients and optimizer moments).
  ModelState zeros_like() const;

  // Stable order: embeddings, projections by modality, mask token, decoder.
  std::vector<ParameterView> parameters();
  std::vector<ConstParameterView> parameters() const;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for embeddings, projections and decoder;
// zero biases; mask token set to the mean augmented feature row. One projection
// is created per modality present in the bank.
ModelState init_model(const HyperParams& hp, int num_users, int num_items, const FeatureBank& bank,
                      Rng& rng);

// Largest |a - b| over all parameters; throws if the layouts differ.
double max_abs_difference(const ModelState& a, const ModelState& b);

}  // namespace augrec
