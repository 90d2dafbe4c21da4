#include "doctest.h"

#include <fstream>

#include "augrec/model/checkpoint.hpp"
#include "augrec/model/encoder.hpp"
#include "augrec/model/model_state.hpp"
#include "support.hpp"

using namespace augrec;
using augrec::testing::TempDir;

namespace {

ModelState tiny_state(int nu, int ni, int d, const FeatureBank& bank, std::uint64_t seed, int llm_dim = 6) {
  HyperParams hp;
  hp.dim = d;
  hp.llm_dim = llm_dim;
  hp.num_layers = 2;
  Rng rng(seed);
  return init_model(hp, nu, ni, bank, rng);
}

FeatureBank tiny_bank(int nu, int ni, int llm_dim, Rng& rng) {
  FeatureBank bank;
  bank.set(Modality::textual, testing::random_matrix(ni, 5, rng));
  bank.set(Modality::aug_user, testing::random_matrix(nu, llm_dim, rng));
  bank.set(Modality::aug_item, testing::random_matrix(ni, llm_dim, rng));
  return bank;
}

}  // namespace

TEST_CASE("propagation examples") {
  SUBCASE("zero layers return the input") {
    Rng rng(1);
    const NormalizedAdjacency adj({{0, 0}, {1, 1}, {1, 0}}, 2, 2);
    const Matrix x = testing::random_matrix(4, 3, rng);
    CHECK(propagate(adj, x, 0) == x);
  }
  SUBCASE("single edge, one layer") {
    const NormalizedAdjacency adj({{0, 0}}, 1, 1);
    Matrix x(2, 2);
    x << 1, 0, 0, 1;
    const Matrix out = propagate(adj, x, 1);
    CHECK(out(0, 0) == doctest::Approx(0.5));
    CHECK(out(0, 1) == doctest::Approx(0.5));
  }
  SUBCASE("disconnected node keeps its own embedding") {
    const NormalizedAdjacency adj({{0, 0}}, 2, 1);
    Rng rng(2);
    const Matrix x = testing::random_matrix(3, 4, rng);
    for (int layers : {1, 2, 5}) {
      const Matrix out = propagate(adj, x, layers);
      CHECK((out.row(1) - x.row(1) / static_cast<double>(layers + 1)).norm() < 1e-12);
    }
  }
  SUBCASE("negative depth is rejected") {
    const NormalizedAdjacency adj({{0, 0}}, 1, 1);
    CHECK_THROWS_AS(propagate(adj, Matrix::Zero(2, 1), -1), ConfigError);
  }
}

TEST_CASE("propagation matches dense matrix powers on graphs up to 30 nodes") {
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    std::uniform_int_distribution<int> size(1, 15);
    const int nu = size(rng);
    const int ni = size(rng);
    const auto edges = testing::random_edges(nu, ni, 0.3, rng);
    const NormalizedAdjacency adj(edges, nu, ni);
    const Matrix x = testing::random_matrix(nu + ni, 3, rng);
    const Matrix a = testing::dense_adjacency(edges, nu, ni);
    for (int layers = 0; layers <= 3; ++layers) {
      CHECK((propagate(adj, x, layers) - testing::dense_propagate(a, x, layers)).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("projection") {
  SUBCASE("identity weight, zero bias, no dropout passes rows through") {
    FeatureBank bank;
    Matrix f(2, 3);
    f << 1, 2, 3, 4, 5, 6;
    bank.set(Modality::textual, f);
    ModelState s;
    s.hp.dim = 3;
    s.projections[Modality::textual] = {Matrix::Identity(3, 3), RowVector::Zero(3)};
    CHECK(project_features(bank, s, false, 0).values.at(Modality::textual) == f);
  }
  SUBCASE("dropout masks depend only on the seed") {
    Rng rng(3);
    FeatureBank bank;
    bank.set(Modality::visual, testing::random_matrix(20, 8, rng));
    ModelState s = tiny_state(4, 20, 6, bank, 1);
    s.hp.dropout = 0.5;
    const auto a = project_features(bank, s, true, 99);
    const auto b = project_features(bank, s, true, 99);
    const auto c = project_features(bank, s, true, 100);
    CHECK(a.dropout_masks.at(Modality::visual) == b.dropout_masks.at(Modality::visual));
    CHECK(a.values.at(Modality::visual) == b.values.at(Modality::visual));
    CHECK_FALSE(a.dropout_masks.at(Modality::visual) == c.dropout_masks.at(Modality::visual));
    CHECK(project_features(bank, s, false, 99).dropout_masks.empty());
  }
  SUBCASE("augmented width projects to the embedding size") {
    Rng rng(4);
    FeatureBank bank;
    bank.set(Modality::aug_item, testing::random_matrix(3, kAugmentedDim, rng));
    HyperParams hp;
    Rng init(5);
    const ModelState s = init_model(hp, 2, 3, bank, init);
    CHECK(project_features(bank, s, false, 0).values.at(Modality::aug_item).cols() == 64);
  }
  SUBCASE("input width mismatch is rejected") {
    Rng rng(6);
    FeatureBank bank;
    bank.set(Modality::textual, testing::random_matrix(3, 4, rng));
    ModelState s;
    s.projections[Modality::textual] = {Matrix::Zero(5, 2), RowVector::Zero(2)};
    CHECK_THROWS_AS(project_features(bank, s, false, 0), ConfigError);
  }
}

TEST_CASE("feature incorporation") {
  SUBCASE("normalize then scale") {
    Matrix e(1, 2), f(1, 2);
    e << 1, 0;
    f << 0, 2;
    const Matrix h = incorporate(e, {&f}, 0.5);
    CHECK(h(0, 0) == doctest::Approx(1.0));
    CHECK(h(0, 1) == doctest::Approx(0.5));
  }
  SUBCASE("zero scale returns the embeddings exactly") {
    Rng rng(1);
    const Matrix e = testing::random_matrix(4, 3, rng);
    const Matrix f = testing::random_matrix(4, 3, rng);
    CHECK(incorporate(e, {&f}, 0.0) == e);
  }
  SUBCASE("two features normalized separately") {
    Matrix e = Matrix::Zero(1, 2), f1(1, 2), f2(1, 2);
    f1 << 3, 0;
    f2 << 0, 4;
    const Matrix h = incorporate(e, {&f1, &f2}, 1.0);
    CHECK(h(0, 0) == doctest::Approx(1.0));
    CHECK(h(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("zero-norm feature rows contribute nothing") {
    Matrix e(2, 2), f(2, 2);
    e << 1, 2, 3, 4;
    f << 0, 0, 1, 0;
    const Matrix h = incorporate(e, {&f}, 2.0);
    CHECK(h.row(0) == e.row(0));
    CHECK(h.allFinite());
  }
  SUBCASE("positive rescaling of a feature row leaves h unchanged") {
    Rng rng(8);
    const Matrix e = testing::random_matrix(6, 4, rng);
    const Matrix f = testing::random_matrix(6, 4, rng);
    Matrix g = f;
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (Eigen::Index r = 0; r < g.rows(); ++r) g.row(r) *= scale(rng);
    CHECK((incorporate(e, {&f}, 0.7) - incorporate(e, {&g}, 0.7)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("scoring is the inner product of final representations") {
  Matrix h(3, 2);
  h << 1, 0,   // user
      1, 0,    // item 0
      0, 1;    // item 1
  const Vector s = score_all(0, h, 1);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(0.0));

  Rng rng(9);
  const Matrix r = testing::random_matrix(5, 4, rng);  // 2 users, 3 items
  const Vector all = score_all(1, r, 2);
  REQUIRE(all.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(all[i] == doctest::Approx(r.row(1).dot(r.row(2 + i))));
}

TEST_CASE("parameter count formula") {
  Rng rng(10);
  const int nu = 7, ni = 9, d = 4, llm = 6;
  const FeatureBank bank = tiny_bank(nu, ni, llm, rng);
  const ModelState s = tiny_state(nu, ni, d, bank, 3, llm);
  const std::size_t expected = static_cast<std::size_t>((nu + ni) * d + (5 * d + d) + 2 * (llm * d + d) + llm +
                                                        (d * llm + llm));
  CHECK(s.parameter_count() == expected);
  std::size_t viewed = 0;
  for (const auto& p : s.parameters()) viewed += p.size;
  CHECK(viewed == expected);
}

TEST_CASE("initialization") {
  Rng rng(11);
  const int nu = 5, ni = 6, llm = 6;
  const FeatureBank bank = tiny_bank(nu, ni, llm, rng);
  const ModelState s = tiny_state(nu, ni, 4, bank, 12, llm);
  SUBCASE("mask token starts at the mean augmented row") {
    RowVector mean = RowVector::Zero(llm);
    mean += bank.at(Modality::aug_user).colwise().sum();
    mean += bank.at(Modality::aug_item).colwise().sum();
    mean /= static_cast<double>(nu + ni);
    CHECK((s.mask_token - mean).norm() < 1e-12);
  }
  SUBCASE("biases are zero and weights bounded by 1/sqrt(fan_in)") {
    for (const auto& [m, p] : s.projections) {
      CHECK(p.bias.isZero());
      CHECK(p.weight.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(static_cast<double>(p.weight.rows())));
    }
    CHECK(s.decoder_bias.isZero());
    CHECK(s.all_finite());
  }
  SUBCASE("seeded") {
    const ModelState t = tiny_state(nu, ni, 4, bank, 12, llm);
    CHECK(max_abs_difference(s, t) == 0.0);
    CHECK(max_abs_difference(s, tiny_state(nu, ni, 4, bank, 13, llm)) > 0.0);
  }
  SUBCASE("augmented width must match llm_dim") {
    HyperParams hp;
    hp.llm_dim = 7;
    Rng r(1);
    CHECK_THROWS_AS(init_model(hp, nu, ni, bank, r), ConfigError);
  }
  SUBCASE("non-finite parameters are detected") {
    ModelState t = s;
    t.item_embedding(2, 1) = std::numeric_limits<double>::infinity();
    CHECK_FALSE(t.all_finite());
  }
}

TEST_CASE("checkpoint round trip") {
  TempDir dir("ckpt");
  Rng rng(13);
  const FeatureBank bank = tiny_bank(4, 5, 6, rng);
  const ModelState s = tiny_state(4, 5, 3, bank, 14, 6);
  save_checkpoint(dir / "a.bin", s, {{"note", "x"}});
  const LoadedCheckpoint back = load_checkpoint(dir / "a.bin");
  CHECK(back.metadata.at("note") == "x");
  CHECK(back.state.hp == s.hp);
  CHECK(back.state.projections.size() == s.projections.size());
  CHECK(max_abs_difference(back.state, s) < 1e-6);  // float32 storage

  // Saving what was loaded is lossless and byte-identical.
  save_checkpoint(dir / "b.bin", back.state, {{"note", "x"}});
  save_checkpoint(dir / "c.bin", load_checkpoint(dir / "b.bin").state, {{"note", "x"}});
  CHECK(file_sha256_hex((dir / "b.bin").string()) == file_sha256_hex((dir / "c.bin").string()));

  SUBCASE("header is ASCII JSON naming every tensor") {
    std::ifstream in(dir / "a.bin", std::ios::binary);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 8);
    std::string header(len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(len));
    const auto j = nlohmann::json::parse(header);
    CHECK(j.at("tensors").size() == s.parameters().size());
    CHECK(j.at("tensors").at("user_embedding").at("shape") == nlohmann::json::array({4, 3}));
    CHECK(j.at("tensors").at("user_embedding").at("dtype") == "f32");
  }
  SUBCASE("missing or foreign files") {
    CHECK_THROWS_AS(load_checkpoint(dir / "none.bin"), MissingInputError);
    std::ofstream(dir / "junk.bin") << "not a checkpoint at all";
    CHECK_THROWS_AS(load_checkpoint(dir / "junk.bin"), DataError);
  }
}
