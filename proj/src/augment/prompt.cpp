#include "augrec/augment/prompt.hpp"

#include <sstream>

namespace augrec {

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::ui_edge: return "ui_edge";
    case PromptKind::user_profile: return "user_profile";
    case PromptKind::item_attr: return "item_attr";
  }
  return "unknown";
}

PromptKind prompt_kind_from_string(std::string_view name) {
  for (PromptKind k : {PromptKind::ui_edge, PromptKind::user_profile, PromptKind::item_attr}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown prompt kind '" + std::string(name) + "'");
}

std::span<const std::string_view> attribute_fields(PromptKind kind) {
  switch (kind) {
    case PromptKind::user_profile: return kProfileFields;
    case PromptKind::item_attr: return kItemFields;
    case PromptKind::ui_edge: break;
  }
  return {};
}

std::string_view PromptRecord::section(const std::string& name) const {
  const auto it = sections.find(name);
  if (it == sections.end()) return {};
  return std::string_view(text).substr(it->second.begin, it->second.length);
}

std::string describe_item(const ItemMetadata& item) {
  std::string out = item.title;
  if (!item.year.empty()) out += " (" + item.year + ")";
  for (const auto& genre : item.genres) out += ", " + genre;
  return out;
}

namespace {

class PromptWriter {
 public:
  explicit PromptWriter(PromptRecord& record) : record_(record) {}

  void section(const std::string& name, const std::string& body) {
    if (!record_.text.empty()) record_.text += "\n\n";
    record_.sections[name] = {record_.text.size(), body.size()};
    record_.text += body;
  }

 private:
  PromptRecord& record_;
};

const ItemMetadata& item_at(const PromptContext& context, int item) {
  if (!context.items || item < 0 || static_cast<std::size_t>(item) >= context.items->size()) {
    throw DataError("no description for item " + std::to_string(item));
  }
  return (*context.items)[static_cast<std::size_t>(item)];
}

std::string history_block(const PromptContext& context, int user) {
  if (!context.history || user < 0 || static_cast<std::size_t>(user) >= context.history->size()) {
    throw DataError("no history for user " + std::to_string(user));
  }
  const auto& items = (*context.history)[static_cast<std::size_t>(user)];
  if (items.empty()) throw DataError("user " + std::to_string(user) + " has an empty history");
  std::ostringstream out;
  out << "Movies the user has watched:";
  const std::size_t shown = std::min(items.size(), context.max_history);
  for (std::size_t k = 0; k < shown; ++k) out << "\n- " << describe_item(item_at(context, items[k]));
  return out.str();
}

std::string field_format(PromptKind kind) {
  std::ostringstream out;
  out << "Reply with one line per field in this order, formatted as `field: value`. Write `unknown` when a "
         "value cannot be inferred.";
  for (std::string_view f : attribute_fields(kind)) out << "\n" << f << ": <value>";
  return out.str();
}

}  // namespace

PromptRecord build_prompt(PromptKind kind, int subject, const PromptContext& context,
                          std::span<const int> candidates) {
  PromptRecord record;
  record.kind = kind;
  record.subject = subject;
  PromptWriter w(record);

  switch (kind) {
    case PromptKind::ui_edge: {
      if (candidates.size() < 2) throw DataError("an edge prompt needs at least two candidates");
      const std::string history = history_block(context, subject);
      w.section("task",
                "Task: a movie recommender needs feedback for one user. From the candidate list below, choose "
                "the movie this user would most likely enjoy and the movie this user would most likely dislike, "
                "judging only by the watching history.");
      w.section("history", history);
      std::ostringstream list;
      list << "Candidate movies:";
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        list << "\n[" << k << "] " << describe_item(item_at(context, candidates[k]));
      }
      w.section("candidates", list.str());
      w.section("output_format",
                "Reply with exactly two lines and nothing else:\nPOS: <candidate_index>\nNEG: <candidate_index>\n"
                "Both indices must come from the candidate list and must differ.");
      record.candidates.assign(candidates.begin(), candidates.end());
      break;
    }
    case PromptKind::user_profile: {
      const std::string history = history_block(context, subject);
      w.section("task",
                "Task: infer the profile of a movie viewer from their watching history. Base every field on the "
                "movies listed.");
      w.section("history", history);
      w.section("output_format", field_format(kind));
      break;
    }
    case PromptKind::item_attr: {
      w.section("task", "Task: supply the missing attributes of a movie.");
      w.section("history", "Movie: " + describe_item(item_at(context, subject)));
      w.section("output_format", field_format(kind));
      break;
    }
  }
  return record;
}

}  // namespace augrec
