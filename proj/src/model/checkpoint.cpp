#include "augrec/model/checkpoint.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace augrec {

namespace {

constexpr const char* kFormat = "augrec-checkpoint";
constexpr int kVersion = 1;

void write_u64_le(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  if (!in) throw DataError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

std::int64_t dim_at(const nlohmann::json& shape, std::size_t i) { return shape.at(i).get<std::int64_t>(); }

}  // namespace

nlohmann::json to_json(const HyperParams& hp) {
  return {{"dim", hp.dim}, {"llm_dim", hp.llm_dim}, {"num_layers", hp.num_layers}, {"dropout", hp.dropout}};
}

HyperParams hyper_params_from_json(const nlohmann::json& j) {
  HyperParams hp;
  hp.dim = j.at("dim").get<int>();
  hp.llm_dim = j.at("llm_dim").get<int>();
  hp.num_layers = j.at("num_layers").get<int>();
  hp.dropout = j.at("dropout").get<double>();
  hp.validate();
  return hp;
}

void save_checkpoint(const std::filesystem::path& path, const ModelState& state,
                     const nlohmann::json& metadata) {
  nlohmann::json header;
  header["format"] = kFormat;
  header["version"] = kVersion;
  header["hyper_params"] = to_json(state.hp);
  header["metadata"] = metadata;
  nlohmann::json tensors = nlohmann::json::object();
  std::uint64_t offset = 0;
  const auto params = state.parameters();
  for (const auto& p : params) {
    const std::uint64_t len = p.size * sizeof(float);
    tensors[p.name] = {{"dtype", "f32"}, {"shape", p.shape}, {"offset", offset}, {"length", len}};
    offset += len;
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  write_u64_le(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  std::vector<float> buf;
  for (const auto& p : params) {
    buf.assign(p.size, 0.0f);
    for (std::size_t i = 0; i < p.size; ++i) buf[i] = static_cast<float>(p.data[i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open checkpoint " + path.string());
  const std::uint64_t header_len = read_u64_le(in);
  if (header_len > (1ULL << 30)) throw DataError("checkpoint header too large");
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("checkpoint header truncated");
  const auto header = nlohmann::json::parse(text);
  if (header.value("format", "") != kFormat) throw DataError("not an augrec checkpoint: " + path.string());

  const auto data_start = static_cast<std::streamoff>(8 + header_len);
  LoadedCheckpoint out;
  out.metadata = header.value("metadata", nlohmann::json::object());
  ModelState& s = out.state;
  s.hp = hyper_params_from_json(header.at("hyper_params"));
  const auto& tensors = header.at("tensors");

  // Allocate every tensor from its recorded shape, then fill through the views.
  for (const auto& [name, info] : tensors.items()) {
    if (info.at("dtype") != "f32") throw DataError("unsupported dtype for " + name);
    const auto& shape = info.at("shape");
    if (name == "user_embedding") {
      s.user_embedding.resize(dim_at(shape, 0), dim_at(shape, 1));
    } else if (name == "item_embedding") {
      s.item_embedding.resize(dim_at(shape, 0), dim_at(shape, 1));
    } else if (name == "mask_token") {
      s.mask_token.resize(dim_at(shape, 0));
    } else if (name == "decoder.weight") {
      s.decoder_weight.resize(dim_at(shape, 0), dim_at(shape, 1));
    } else if (name == "decoder.bias") {
      s.decoder_bias.resize(dim_at(shape, 0));
    } else if (name.rfind("projection.", 0) == 0) {
      const auto dot = name.find('.', 11);
      const Modality m = modality_from_string(name.substr(11, dot - 11));
      const std::string field = name.substr(dot + 1);
      Projection& p = s.projections[m];
      if (field == "weight") {
        p.weight.resize(dim_at(shape, 0), dim_at(shape, 1));
      } else if (field == "bias") {
        p.bias.resize(dim_at(shape, 0));
      } else {
        throw DataError("unknown checkpoint tensor " + name);
      }
    } else {
      throw DataError("unknown checkpoint tensor " + name);
    }
  }

  std::vector<float> buf;
  for (auto& p : s.parameters()) {
    if (!tensors.contains(p.name)) throw DataError("checkpoint is missing tensor " + p.name);
    const auto& info = tensors.at(p.name);
    const auto len = info.at("length").get<std::uint64_t>();
    if (len != p.size * sizeof(float)) throw DataError("checkpoint tensor " + p.name + " has inconsistent length");
    in.seekg(data_start + static_cast<std::streamoff>(info.at("offset").get<std::uint64_t>()));
    buf.resize(p.size);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(len));
    if (!in) throw DataError("checkpoint data truncated at " + p.name);
    for (std::size_t i = 0; i < p.size; ++i) p.data[i] = buf[i];
  }
  return out;
}

}  // namespace augrec
