#include "augrec/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace augrec {

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

// Weighted sampling without replacement (Efraimidis-Spirakis keys).
std::vector<int> sample_weighted(const Vector& logits, int count, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double peak = logits.maxCoeff();
  std::vector<std::pair<double, int>> keys;
  keys.reserve(static_cast<std::size_t>(logits.size()));
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double u = std::max(unit(rng), 1e-300);
    keys.emplace_back(std::log(u) / std::exp(logits(i) - peak), static_cast<int>(i));
  }
  std::partial_sort(keys.begin(), keys.begin() + count, keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<int> out;
  for (int k = 0; k < count; ++k) out.push_back(keys[static_cast<std::size_t>(k)].second);
  return out;
}

}  // namespace

const std::vector<std::string>& genre_names() {
  static const std::vector<std::string> names = {
      "comedy", "drama",   "thriller", "romance",   "horror",  "animation", "documentary",
      "action", "fantasy", "western",  "musical",   "mystery", "sci-fi",    "crime",
      "war",    "family",  "history",  "adventure", "sport",   "biography"};
  return names;
}

void SyntheticConfig::validate() const {
  if (num_users < 1 || num_items < 2 || num_factors < 1) throw ConfigError("synthetic: sizes must be positive");
  if (num_factors > static_cast<int>(genre_names().size())) {
    throw ConfigError("synthetic: at most " + std::to_string(genre_names().size()) + " factors supported");
  }
  if (density <= 0 || density >= 1) throw ConfigError("synthetic: density must be in (0, 1)");
  if (click_noise < 0 || click_noise >= 1) throw ConfigError("synthetic: click_noise must be in [0, 1)");
  if (textual_dim < 1 || visual_dim < 1) throw ConfigError("synthetic: feature dims must be positive");
  if (preference_temperature <= 0) throw ConfigError("synthetic: preference_temperature must be positive");
}

SyntheticDataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const int nu = config.num_users;
  const int ni = config.num_items;
  const int k = config.num_factors;
  SyntheticDataset ds;

  std::uniform_int_distribution<int> genre_dist(0, k - 1);
  ds.item_genre.resize(static_cast<std::size_t>(ni));
  ds.item_factors = gaussian(ni, k, 0.5, rng);
  for (int i = 0; i < ni; ++i) {
    const int g = genre_dist(rng);
    ds.item_genre[static_cast<std::size_t>(i)] = g;
    ds.item_factors(i, g) += config.genre_strength;
  }
  ds.user_factors = gaussian(nu, k, 0.5, rng);
  std::bernoulli_distribution second_genre(0.5);
  for (int u = 0; u < nu; ++u) {
    ds.user_factors(u, genre_dist(rng)) += config.genre_strength;
    if (second_genre(rng)) ds.user_factors(u, genre_dist(rng)) += 0.5 * config.genre_strength;
  }

  for (int u = 0; u < nu; ++u) ds.graph.users.intern("u" + std::to_string(u));
  for (int i = 0; i < ni; ++i) ds.graph.items.intern("i" + std::to_string(i));
  ds.graph.num_users = nu;
  ds.graph.num_items = ni;

  const int per_user = std::clamp(static_cast<int>(std::lround(config.density * ni)), 3, ni - 1);
  std::bernoulli_distribution is_noise(config.click_noise);
  std::uniform_int_distribution<int> any_item(0, ni - 1);
  const Matrix affinity = ds.user_factors * ds.item_factors.transpose() / config.preference_temperature;
  for (int u = 0; u < nu; ++u) {
    std::vector<int> chosen = sample_weighted(affinity.row(u).transpose(), per_user, rng);
    for (int& item : chosen) {
      if (!is_noise(rng)) continue;
      int replacement = any_item(rng);
      while (std::find(chosen.begin(), chosen.end(), replacement) != chosen.end()) replacement = any_item(rng);
      item = replacement;
    }
    std::sort(chosen.begin(), chosen.end());
    for (int item : chosen) ds.graph.edges.push_back({u, item});
  }

  const Matrix text_proj = gaussian(k, config.textual_dim, 1.0 / std::sqrt(k), rng);
  const Matrix vis_proj = gaussian(k, config.visual_dim, 1.0 / std::sqrt(k), rng);
  ds.features.set(Modality::textual,
                  ds.item_factors * text_proj + gaussian(ni, config.textual_dim, config.feature_noise, rng));
  ds.features.set(Modality::visual,
                  ds.item_factors * vis_proj + gaussian(ni, config.visual_dim, config.feature_noise, rng));

  std::uniform_int_distribution<int> year_dist(1960, 2020);
  const auto& genres = genre_names();
  ds.items.resize(static_cast<std::size_t>(ni));
  for (int i = 0; i < ni; ++i) {
    ItemMetadata& m = ds.items[static_cast<std::size_t>(i)];
    m.title = "Feature Film No. " + std::to_string(i);
    m.year = std::to_string(year_dist(rng));
    m.genres.push_back(genres[static_cast<std::size_t>(ds.item_genre[static_cast<std::size_t>(i)])]);
  }
  return ds;
}

}  // namespace augrec
