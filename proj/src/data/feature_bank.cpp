#include "augrec/data/feature_bank.hpp"

#include "json.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace augrec {

static_assert(std::endian::native == std::endian::little, "feature files assume a little-endian host");

namespace {

std::filesystem::path with_ext(std::filesystem::path p, const char* ext) {
  p.replace_extension(ext);
  return p;
}

std::optional<Eigen::Index> first_nonfinite_row(const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!m.row(r).allFinite()) return r;
  }
  return std::nullopt;
}

Matrix read_binary(const std::filesystem::path& stem) {
  const auto meta_path = with_ext(stem, ".meta");
  const auto data_path = with_ext(stem, ".f32");
  std::ifstream meta(meta_path);
  if (!meta) throw MissingInputError("cannot open feature header " + meta_path.string());
  long long rows = -1;
  long long dim = -1;
  if (!(meta >> rows >> dim) || rows < 0 || dim <= 0) {
    throw DataError("feature header " + meta_path.string() + " must hold `rows dim`");
  }
  std::ifstream data(data_path, std::ios::binary | std::ios::ate);
  if (!data) throw MissingInputError("cannot open feature file " + data_path.string());
  const auto bytes = static_cast<long long>(data.tellg());
  if (bytes != rows * dim * 4) {
    throw DataError("feature file " + data_path.string() + " has " + std::to_string(bytes) +
                    " bytes, header implies " + std::to_string(rows * dim * 4));
  }
  data.seekg(0);
  std::vector<float> buf(static_cast<std::size_t>(rows * dim));
  data.read(reinterpret_cast<char*>(buf.data()), bytes);
  Matrix out(rows, dim);
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < dim; ++c) out(r, c) = buf[static_cast<std::size_t>(r * dim + c)];
  }
  return out;
}

Matrix read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open feature file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("feature row is not JSON: ") + e.what(), line_no);
    }
    std::vector<double> row;
    for (const auto& v : j) {
      // NaN/Inf are not representable in JSON; nulls stand in for them.
      row.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged feature row", line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("feature file " + path.string() + " is empty");
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::textual: return "textual";
    case Modality::visual: return "visual";
    case Modality::aug_user: return "aug_user";
    case Modality::aug_item: return "aug_item";
  }
  return "?";
}

Modality modality_from_string(std::string_view name) {
  for (Modality m : {Modality::textual, Modality::visual, Modality::aug_user, Modality::aug_item}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown modality '" + std::string(name) + "'");
}

bool is_user_side(Modality m) { return m == Modality::aug_user; }
bool is_augmented(Modality m) { return m == Modality::aug_user || m == Modality::aug_item; }

void FeatureBank::set(Modality m, Matrix values) { entries_[m] = std::move(values); }

const Matrix& FeatureBank::at(Modality m) const {
  auto it = entries_.find(m);
  if (it == entries_.end()) throw DataError("feature bank has no '" + std::string(to_string(m)) + "' entry");
  return it->second;
}

std::vector<Modality> FeatureBank::modalities() const {
  std::vector<Modality> out;
  for (const auto& [m, _] : entries_) out.push_back(m);
  return out;
}

void FeatureBank::validate(int num_users, int num_items) const {
  for (const auto& [m, values] : entries_) {
    const int expected = is_user_side(m) ? num_users : num_items;
    if (values.rows() != expected) {
      throw DataError(std::string(to_string(m)) + " features have " + std::to_string(values.rows()) +
                      " rows, expected " + std::to_string(expected));
    }
    if (const auto bad = first_nonfinite_row(values)) {
      throw DataError(std::string(to_string(m)) + " features: non-finite value in row " +
                      std::to_string(*bad));
    }
  }
}

Matrix read_feature_file(const std::filesystem::path& path) {
  if (path.extension() == ".jsonl") return read_jsonl(path);
  return read_binary(path);
}

void write_feature_file(const std::filesystem::path& path, const Matrix& values) {
  {
    std::ofstream meta(with_ext(path, ".meta"));
    if (!meta) throw Error("cannot write " + with_ext(path, ".meta").string());
    meta << values.rows() << ' ' << values.cols() << '\n';
  }
  std::ofstream data(with_ext(path, ".f32"), std::ios::binary);
  if (!data) throw Error("cannot write " + with_ext(path, ".f32").string());
  std::vector<float> row(static_cast<std::size_t>(values.cols()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) row[static_cast<std::size_t>(c)] = static_cast<float>(values(r, c));
    data.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

void write_feature_jsonl(const std::filesystem::path& path, const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < values.cols(); ++c) row.push_back(values(r, c));
    out << row.dump() << '\n';
  }
}

FeatureBank load_feature_bank(const std::map<Modality, std::filesystem::path>& paths,
                              const std::map<Modality, int>& dims, int num_users, int num_items) {
  FeatureBank bank;
  for (const auto& [m, path] : paths) {
    Matrix values = read_feature_file(path);
    if (auto it = dims.find(m); it != dims.end() && values.cols() != it->second) {
      throw DataError(std::string(to_string(m)) + " features have dim " + std::to_string(values.cols()) +
                      ", expected " + std::to_string(it->second));
    }
    bank.set(m, std::move(values));
  }
  bank.validate(num_users, num_items);
  return bank;
}

}  // namespace augrec
