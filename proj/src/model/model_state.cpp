#include "augrec/model/model_state.hpp"

#include <algorithm>
#include <cmath>

namespace augrec {

namespace {

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

template <typename View, typename M>
View view_of(std::string name, M& m) {
  return View{std::move(name), m.data(), static_cast<std::size_t>(m.size()),
              M::IsVectorAtCompileTime ? std::vector<std::int64_t>{m.size()}
                                       : std::vector<std::int64_t>{m.rows(), m.cols()}};
}

template <typename View, typename State>
std::vector<View> collect(State& s) {
  std::vector<View> out;
  out.push_back(view_of<View>("user_embedding", s.user_embedding));
  out.push_back(view_of<View>("item_embedding", s.item_embedding));
  for (auto& [m, p] : s.projections) {
    const std::string prefix = "projection." + std::string(to_string(m));
    out.push_back(view_of<View>(prefix + ".weight", p.weight));
    out.push_back(view_of<View>(prefix + ".bias", p.bias));
  }
  out.push_back(view_of<View>("mask_token", s.mask_token));
  out.push_back(view_of<View>("decoder.weight", s.decoder_weight));
  out.push_back(view_of<View>("decoder.bias", s.decoder_bias));
  return out;
}

}  // namespace

void HyperParams::validate() const {
  if (dim < 1) throw ConfigError("model.dim must be >= 1");
  if (llm_dim < 1) throw ConfigError("model.llm_dim must be >= 1");
  if (num_layers < 0) throw ConfigError("model.num_layers must be >= 0");
  if (dropout < 0 || dropout >= 1) throw ConfigError("model.dropout must be in [0, 1)");
}

std::size_t ModelState::parameter_count() const {
  std::size_t n = 0;
  for (const auto& v : parameters()) n += v.size;
  return n;
}

bool ModelState::all_finite() const {
  for (const auto& v : parameters()) {
    if (!std::all_of(v.data, v.data + v.size, [](double x) { return std::isfinite(x); })) return false;
  }
  return true;
}

double ModelState::squared_norm() const {
  double s = 0.0;
  for (const auto& v : parameters()) {
    for (std::size_t i = 0; i < v.size; ++i) s += v.data[i] * v.data[i];
  }
  return s;
}

ModelState ModelState::zeros_like() const {
  ModelState z = *this;
  for (auto& v : z.parameters()) std::fill(v.data, v.data + v.size, 0.0);
  return z;
}

std::vector<ParameterView> ModelState::parameters() { return collect<ParameterView>(*this); }
std::vector<ConstParameterView> ModelState::parameters() const { return collect<ConstParameterView>(*this); }

ModelState init_model(const HyperParams& hp, int num_users, int num_items, const FeatureBank& bank,
                      Rng& rng) {
  hp.validate();
  ModelState s;
  s.hp = hp;
  const double emb_bound = 1.0 / std::sqrt(static_cast<double>(hp.dim));
  s.user_embedding = uniform(num_users, hp.dim, emb_bound, rng);
  s.item_embedding = uniform(num_items, hp.dim, emb_bound, rng);

  RowVector feature_sum = RowVector::Zero(hp.llm_dim);
  Eigen::Index feature_rows = 0;
  for (Modality m : bank.modalities()) {
    const Matrix& f = bank.at(m);
    if (is_augmented(m)) {
      if (f.cols() != hp.llm_dim) {
        throw ConfigError(std::string(to_string(m)) + " features have dim " + std::to_string(f.cols()) +
                          " but model.llm_dim is " + std::to_string(hp.llm_dim));
      }
      feature_sum += f.colwise().sum();
      feature_rows += f.rows();
    }
    Projection p;
    p.weight = uniform(f.cols(), hp.dim, 1.0 / std::sqrt(static_cast<double>(f.cols())), rng);
    p.bias = RowVector::Zero(hp.dim);
    s.projections.emplace(m, std::move(p));
  }
  s.mask_token = feature_rows > 0 ? RowVector(feature_sum / static_cast<double>(feature_rows))
                                  : RowVector(RowVector::Zero(hp.llm_dim));
  s.decoder_weight = uniform(hp.dim, hp.llm_dim, emb_bound, rng);
  s.decoder_bias = RowVector::Zero(hp.llm_dim);
  return s;
}

double max_abs_difference(const ModelState& a, const ModelState& b) {
  const auto va = a.parameters();
  const auto vb = b.parameters();
  if (va.size() != vb.size()) throw Error("model layouts differ");
  double worst = 0.0;
  for (std::size_t t = 0; t < va.size(); ++t) {
    if (va[t].name != vb[t].name || va[t].size != vb[t].size) throw Error("model layouts differ at " + va[t].name);
    for (std::size_t i = 0; i < va[t].size; ++i) worst = std::max(worst, std::abs(va[t].data[i] - vb[t].data[i]));
  }
  return worst;
}

}  // namespace augrec
