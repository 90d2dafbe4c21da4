#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "augrec/core.hpp"

namespace augrec {

enum class Modality { textual, visual, aug_user, aug_item };

inline constexpr int kTextualDim = 768;
inline constexpr int kVisualDim = 512;
inline constexpr int kAugmentedDim = 1536;

std::string_view to_string(Modality m);
Modality modality_from_string(std::string_view name);
// aug_user rows align with users; every other modality aligns with items.
bool is_user_side(Modality m);
bool is_augmented(Modality m);

// Per-modality side-feature matrices (original F and augmented F_A).
class FeatureBank {
 public:
  void set(Modality m, Matrix values);
  void erase(Modality m) { entries_.erase(m); }
  bool has(Modality m) const { return entries_.count(m) != 0; }
  const Matrix& at(Modality m) const;
  std::vector<Modality> modalities() const;
  int dim(Modality m) const { return static_cast<int>(at(m).cols()); }
  bool empty() const { return entries_.empty(); }

  // Row counts must match the owning side; every value finite.
  void validate(int num_users, int num_items) const;

 private:
  std::map<Modality, Matrix> entries_;
};

// `<stem>.f32` (little-endian float32, row-major) with `<stem>.meta` ("rows dim"),
// or a `.jsonl` file of one array per row. `path` may name the .f32, .meta or .jsonl file.
Matrix read_feature_file(const std::filesystem::path& path);
void write_feature_file(const std::filesystem::path& path, const Matrix& values);
void write_feature_jsonl(const std::filesystem::path& path, const Matrix& values);

// Throws DataError naming the modality on a dimension mismatch and the row index on NaN/Inf.
FeatureBank load_feature_bank(const std::map<Modality, std::filesystem::path>& paths,
                              const std::map<Modality, int>& dims, int num_users, int num_items);

}  // namespace augrec
