#pragma once

#include <filesystem>

#include "json.hpp"

#include "augrec/model/model_state.hpp"

namespace augrec {

// Container layout:
//   bytes [0, 8)   little-endian u64 header length n
//   bytes [8, 8+n) ASCII JSON header
//   remaining      tensor data, float32 little-endian, row-major
// Header: {"format", "version", "hyper_params", "metadata",
//          "tensors": {name: {"dtype": "f32", "shape": [...], "offset": o, "length": bytes}}}
// with offsets relative to the start of the data section.
void save_checkpoint(const std::filesystem::path& path, const ModelState& state,
                     const nlohmann::json& metadata = nlohmann::json::object());

struct LoadedCheckpoint {
  ModelState state;
  nlohmann::json metadata;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json to_json(const HyperParams& hp);
HyperParams hyper_params_from_json(const nlohmann::json& j);

}  // namespace augrec
