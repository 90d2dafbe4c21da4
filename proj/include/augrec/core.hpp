#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace augrec {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Observed implicit-feedback pair, dense indices.
struct Edge {
  int user = 0;
  int item = 0;
  auto operator<=>(const Edge&) const = default;
};

// BPR training triplet (u, i+, i-).
struct Triplet {
  int user = 0;
  int pos = 0;
  int neg = 0;
  auto operator<=>(const Triplet&) const = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value or combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Required input file is missing or unreadable.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (bad shapes, NaN rows, etc).
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

using Rng = std::mt19937_64;

// Seeds are derived from one root seed through named substreams
// ("split", "init", "batch", "mask", "mock", ...).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);
Rng make_rng(std::uint64_t root, std::string_view stream);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string sha256_hex(std::string_view bytes);
std::string file_sha256_hex(const std::string& path);

inline double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace augrec
