#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "augrec/augment/prompt.hpp"

namespace augrec {

// The model answered, but not in a usable way. Retried by the augmentor.
class ResponseError : public Error {
 public:
  using Error::Error;
};

// The model picked an index that is not on the candidate list.
class UnlistedCandidate : public ResponseError {
 public:
  UnlistedCandidate(long index, std::size_t listed)
      : ResponseError("candidate index " + std::to_string(index) + " is not among the " + std::to_string(listed) +
                      " listed candidates"),
        index_(index) {}
  long index() const { return index_; }

 private:
  long index_;
};

struct EdgeChoice {
  int pos_index = 0;  // position in the candidate list
  int neg_index = 0;
  int pos_item = 0;   // global item index
  int neg_item = 0;
};

// Finds the first `POS: n` and `NEG: n` lines, ignoring case and surrounding prose.
EdgeChoice parse_edge_response(std::string_view text, std::span<const int> candidates);

// Field name -> value, one entry per expected field of the kind. Missing fields
// hold kMissingField.
using AttributeRecord = std::map<std::string, std::string>;
inline constexpr std::string_view kMissingField = "";

AttributeRecord parse_attribute_response(PromptKind kind, std::string_view text);

// Canonical "field: value" lines in field order; this is the text that gets embedded.
std::string render_attributes(PromptKind kind, const AttributeRecord& record);

}  // namespace augrec
