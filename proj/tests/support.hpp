#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "augrec/core.hpp"
#include "augrec/data/interaction_graph.hpp"

namespace augrec::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("augrec_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Random bipartite edge set in which every user has at least one edge.
inline std::vector<Edge> random_edges(int num_users, int num_items, double density, Rng& rng) {
  std::bernoulli_distribution keep(density);
  std::uniform_int_distribution<int> any_item(0, num_items - 1);
  std::vector<Edge> edges;
  for (int u = 0; u < num_users; ++u) {
    bool any = false;
    for (int i = 0; i < num_items; ++i) {
      if (keep(rng)) {
        edges.push_back({u, i});
        any = true;
      }
    }
    if (!any) edges.push_back({u, any_item(rng)});
  }
  return edges;
}

// Dense symmetric normalized adjacency built straight from the definition.
inline Matrix dense_adjacency(const std::vector<Edge>& edges, int num_users, int num_items) {
  const int n = num_users + num_items;
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (const Edge& e : edges) {
    ++deg[static_cast<std::size_t>(e.user)];
    ++deg[static_cast<std::size_t>(num_users + e.item)];
  }
  Matrix a = Matrix::Zero(n, n);
  for (const Edge& e : edges) {
    const double v = 1.0 / std::sqrt(static_cast<double>(deg[static_cast<std::size_t>(e.user)]) *
                                     deg[static_cast<std::size_t>(num_users + e.item)]);
    a(e.user, num_users + e.item) = v;
    a(num_users + e.item, e.user) = v;
  }
  return a;
}

// mean over l = 0..L of A^l x with explicit dense powers.
inline Matrix dense_propagate(const Matrix& a, const Matrix& x, int layers) {
  Matrix power = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = Matrix::Zero(x.rows(), x.cols());
  for (int l = 0; l <= layers; ++l) {
    sum += power * x;
    power = power * a;
  }
  return sum / static_cast<double>(layers + 1);
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

}  // namespace augrec::testing
