#include "augrec/augment/mock_language_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "augrec/augment/response_parser.hpp"

namespace augrec {

namespace {

constexpr std::array<std::string_view, 4> kAgeBands = {"18-24", "25-34", "35-44", "45-54"};
constexpr std::array<std::string_view, 2> kGenders = {"female", "male"};
constexpr std::array<std::pair<std::string_view, std::string_view>, 4> kOrigins = {
    {{"United States", "English"}, {"France", "French"}, {"Japan", "Japanese"}, {"India", "Hindi"}}};

std::string primary_genre(const ItemMetadata& item) { return item.genres.empty() ? "Drama" : item.genres.front(); }

std::string director_of(const ItemMetadata& item) {
  const char letter = static_cast<char>('A' + fnv1a64(item.title) % 4);
  return primary_genre(item) + " auteur " + letter;
}

std::size_t origin_of(const ItemMetadata& item) { return fnv1a64(primary_genre(item)) % kOrigins.size(); }

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

template <typename Count>
std::string most_frequent(const std::map<std::string, Count>& counts) {
  std::string best;
  Count best_count{};
  for (const auto& [key, c] : counts) {
    if (c > best_count) {
      best = key;
      best_count = c;
    }
  }
  return best;
}

}  // namespace

long count_words(std::string_view text) { return static_cast<long>(tokenize(text).size()); }

MockLanguageModel::MockLanguageModel(const PromptContext& context, Matrix item_features, std::uint64_t seed,
                                     int embedding_dim)
    : context_(context), item_features_(std::move(item_features)), seed_(seed), embedding_dim_(embedding_dim) {
  if (!context_.items || !context_.history) throw ConfigError("mock language model needs items and histories");
  if (embedding_dim_ < 1) throw ConfigError("embedding dim must be >= 1");
}

ChatResponse MockLanguageModel::chat(const ChatRequest& request) {
  ++chat_calls_;
  if (!request.prompt) throw ConfigError("mock language model needs the structured prompt");
  const PromptRecord& prompt = *request.prompt;
  ChatResponse out;
  switch (prompt.kind) {
    case PromptKind::ui_edge: out.text = answer_edge(prompt); break;
    case PromptKind::user_profile: out.text = answer_profile(prompt); break;
    case PromptKind::item_attr: out.text = answer_item(prompt); break;
  }
  out.prompt_tokens = count_words(prompt.text);
  out.completion_tokens = count_words(out.text);
  return out;
}

std::string MockLanguageModel::answer_edge(const PromptRecord& prompt) const {
  const auto& history = context_.history->at(static_cast<std::size_t>(prompt.subject));
  if (item_features_.rows() == 0) throw ConfigError("mock edge answers need item features");
  RowVector taste = RowVector::Zero(item_features_.cols());
  for (int i : history) taste += item_features_.row(i);
  taste /= static_cast<double>(std::max<std::size_t>(history.size(), 1));
  const double taste_norm = taste.norm();

  int best = 0;
  int worst = 0;
  double best_cos = 0.0;
  double worst_cos = 0.0;
  for (std::size_t k = 0; k < prompt.candidates.size(); ++k) {
    const auto row = item_features_.row(prompt.candidates[k]);
    const double denom = taste_norm * row.norm();
    const double cos = denom > 0 ? taste.dot(row) / denom : 0.0;
    if (k == 0 || cos > best_cos) {
      best = static_cast<int>(k);
      best_cos = cos;
    }
    if (k == 0 || cos < worst_cos) {
      worst = static_cast<int>(k);
      worst_cos = cos;
    }
  }
  if (worst == best) worst = best == 0 ? 1 : 0;
  return "POS: " + std::to_string(best) + "\nNEG: " + std::to_string(worst);
}

std::string MockLanguageModel::answer_profile(const PromptRecord& prompt) const {
  const auto& history = context_.history->at(static_cast<std::size_t>(prompt.subject));
  std::map<std::string, int> genres;
  std::map<std::string, int> directors;
  std::map<std::size_t, int> origins;
  for (int i : history) {
    const ItemMetadata& item = context_.items->at(static_cast<std::size_t>(i));
    for (const auto& g : item.genres) ++genres[g];
    ++directors[director_of(item)];
    ++origins[origin_of(item)];
  }
  std::set<std::string> all_genres;
  for (const auto& item : *context_.items) all_genres.insert(item.genres.begin(), item.genres.end());
  std::string disliked;
  for (const auto& g : all_genres) {
    if (!genres.count(g)) {
      disliked = g;
      break;
    }
  }
  if (disliked.empty()) {
    int fewest = 0;
    for (const auto& [g, c] : genres) {
      if (disliked.empty() || c < fewest) {
        disliked = g;
        fewest = c;
      }
    }
  }

  std::vector<std::pair<int, std::string>> ranked_directors;
  for (const auto& [d, c] : directors) ranked_directors.emplace_back(-c, d);
  std::sort(ranked_directors.begin(), ranked_directors.end());
  std::string liked_directors;
  for (std::size_t k = 0; k < std::min<std::size_t>(2, ranked_directors.size()); ++k) {
    liked_directors += (k ? ", " : "") + ranked_directors[k].second;
  }
  std::size_t origin = 0;
  int origin_count = 0;
  for (const auto& [o, c] : origins) {
    if (c > origin_count) {
      origin = o;
      origin_count = c;
    }
  }

  const std::uint64_t h = derive_seed(seed_, "profile/" + std::to_string(prompt.subject));
  std::ostringstream out;
  out << "age: " << kAgeBands[h % kAgeBands.size()] << "\n"
      << "gender: " << kGenders[(h >> 8) % kGenders.size()] << "\n"
      << "liked genre: " << most_frequent(genres) << "\n"
      << "disliked genre: " << disliked << "\n"
      << "liked directors: " << liked_directors << "\n"
      << "country: " << kOrigins[origin].first << "\n"
      << "language: " << kOrigins[origin].second;
  return out.str();
}

std::string MockLanguageModel::answer_item(const PromptRecord& prompt) const {
  const ItemMetadata& item = context_.items->at(static_cast<std::size_t>(prompt.subject));
  const auto& origin = kOrigins[origin_of(item)];
  return "director: " + director_of(item) + "\ncountry: " + std::string(origin.first) +
         "\nlanguage: " + std::string(origin.second);
}

EmbeddingResponse MockLanguageModel::embed(const EmbeddingRequest& request) {
  ++embed_calls_;
  if (request.text.empty()) throw DataError("cannot embed empty text");
  auto tokens = tokenize(request.text);
  if (tokens.empty()) tokens.push_back(request.text);
  Vector sum = Vector::Zero(embedding_dim_);
  for (const auto& token : tokens) {
    Rng rng = make_rng(seed_, "embed/" + token);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < embedding_dim_; ++k) sum[k] += normal(rng);
  }
  const double norm = sum.norm();
  if (norm > 0) sum /= norm;
  EmbeddingResponse out;
  out.values.assign(sum.data(), sum.data() + sum.size());
  out.prompt_tokens = static_cast<long>(tokens.size());
  return out;
}

}  // namespace augrec
