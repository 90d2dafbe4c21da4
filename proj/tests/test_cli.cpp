#include "doctest.h"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "augrec/cli/commands.hpp"
#include "augrec/cli/pipeline.hpp"
#include "augrec/cli/run_config.hpp"
#include "augrec/model/checkpoint.hpp"
#include "support.hpp"

using namespace augrec;

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small enough that a full augment + train takes well under a second.
const std::vector<std::string> kSmall = {
    "--set", "dataset.synthetic_users=40",       "--set", "dataset.synthetic_items=60",
    "--set", "dataset.synthetic_factors=4",      "--set", "dataset.synthetic_density=0.1",
    "--set", "dataset.synthetic_textual_dim=8",  "--set", "dataset.synthetic_visual_dim=4",
    "--set", "augment.embedding_dim=16",         "--set", "model.llm_dim=16",
    "--set", "model.dim=8",                      "--set", "augment.base_epochs=2",
    "--set", "train.batch_size=64",              "--set", "train.epochs=3",
    "--set", "augment.max_in_flight=1",          "-q"};

struct Result {
  int code;
  std::string err;
  std::string out;
};

Result run(std::vector<std::string> args, bool small = true) {
  args.insert(args.begin(), "augrec");
  if (small) args.insert(args.end(), kSmall.begin(), kSmall.end());
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream err, out;
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  const int code = run_command(static_cast<int>(argv.size()), argv.data());
  std::cerr.rdbuf(old_err);
  std::cout.rdbuf(old_out);
  return {code, err.str(), out.str()};
}

}  // namespace

TEST_CASE("config registry") {
  RunConfig c;
  std::set<std::string> keys;
  for (const ConfigField& f : config_fields()) {
    CHECK(keys.insert(f.key).second);
    // Every rendered value parses back to itself.
    RunConfig copy;
    const std::string v = f.get(c);
    f.set(copy, v);
    CHECK(f.get(copy) == v);
  }
  for (const char* k : {"train.incorporation_scale", "train.weight_decay", "train.aug_sample_rate",
                        "train.prune_rate", "augment.cand_size", "augment.temperature", "augment.top_p"}) {
    CHECK(keys.count(k) == 1);
  }
  set_config_value(c, "train.prune_rate", "0.3");
  CHECK(c.train.prune_rate == 0.3);
  set_config_value(c, "eval.ks", "5,20");
  CHECK(c.eval_ks == std::vector<int>{5, 20});
  CHECK_THROWS_AS(set_config_value(c, "train.nonsense", "1"), UnknownConfigKey);
  CHECK_THROWS_AS(set_config_value(c, "train.lr", "fast"), ConfigError);

  SUBCASE("defaults validate and out-of-range values do not") {
    RunConfig d;
    d.validate();
    d.train.prune_rate = 1.0;
    CHECK_THROWS_AS(d.validate(), ConfigError);
  }
  SUBCASE("snapshot round trip") {
    testing::TempDir dir("snap");
    RunConfig a;
    set_config_value(a, "train.lr", "0.00123");
    set_config_value(a, "run.seed", "77");
    set_config_value(a, "dataset.name", "synthetic");
    std::ofstream(dir / "a.ini") << render_config(a);
    RunConfig b;
    apply_config_file(b, dir / "a.ini");
    CHECK(render_config(a) == render_config(b));
    CHECK(config_hash(a) == config_hash(b));
    CHECK(b.train.lr == 0.00123);
  }
}

TEST_CASE("exit codes") {
  testing::TempDir dir("exit");
  const std::string out = (dir / "run").string();

  const Result unknown = run({"train", "--out", out, "--set", "train.warp_factor=9"});
  CHECK(unknown.code == kExitConfig);
  CHECK(unknown.err.find("train.warp_factor") != std::string::npos);

  std::ofstream(dir / "bad.ini") << "[train]\nwarp_factor = 9\n";
  const Result from_file = run({"train", "--out", out, "--config", (dir / "bad.ini").string()});
  CHECK(from_file.code == kExitConfig);
  CHECK(from_file.err.find("train.warp_factor") != std::string::npos);

  CHECK(run({"evaluate", "--out", out}).code == kExitMissingInput);
  CHECK(run({"train", "--out", out, "--config", (dir / "absent.ini").string()}).code == kExitMissingInput);
  // train needs the augmentation outputs
  CHECK(run({"train", "--out", out}).code == kExitMissingInput);
  CHECK(run({"fly", "--out", out}).code == kExitConfig);
  CHECK(run({"train", "--out", out, "--omega4", "1.5"}).code == kExitConfig);
}

TEST_CASE("augment, train twice, evaluate") {
  testing::TempDir dir("pipeline");
  const std::string out = (dir / "run").string();

  REQUIRE(run({"augment", "--out", out, "--seed", "7"}).code == kExitOk);
  for (const char* f : {kTripletsFile, kAugUserFile, kAugItemFile, "augment_stats.json", "cache.jsonl",
                        "resolved_config.augment.ini"}) {
    CHECK(std::filesystem::exists(dir / "run" / f));
  }

  REQUIRE(run({"train", "--out", out, "--seed", "7"}).code == kExitOk);
  const std::string ckpt1 = read_text(dir / "run" / "checkpoint.bin");
  const std::string log1 = read_text(dir / "run" / "train_log.jsonl");
  const LoadedCheckpoint first = load_checkpoint(dir / "run" / "checkpoint.bin");
  REQUIRE(run({"train", "--out", out, "--seed", "7"}).code == kExitOk);
  CHECK(read_text(dir / "run" / "checkpoint.bin") == ckpt1);
  const LoadedCheckpoint second = load_checkpoint(dir / "run" / "checkpoint.bin");
  CHECK(max_abs_difference(first.state, second.state) == 0.0);
  CHECK(first.metadata.contains("config_hash"));

  // Same logs once the wall-clock field is removed.
  auto strip = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, acc;
    while (std::getline(in, line)) {
      auto j = nlohmann::json::parse(line);
      j.erase("wall_time");
      acc += j.dump() + "\n";
    }
    return acc;
  };
  CHECK(strip(read_text(dir / "run" / "train_log.jsonl")) == strip(log1));

  SUBCASE("re-running from the snapshot reproduces the checkpoint") {
    const std::string snap = (dir / "run" / "resolved_config.train.ini").string();
    REQUIRE(run({"train", "--config", snap}, false).code == kExitOk);
    CHECK(read_text(dir / "run" / "checkpoint.bin") == ckpt1);
  }
  SUBCASE("evaluate writes a report") {
    REQUIRE(run({"evaluate", "--out", out, "--seed", "7"}).code == kExitOk);
    const auto report = nlohmann::json::parse(read_text(dir / "run" / "eval_report.json"));
    CHECK(report.contains("checkpoint_hash"));
    CHECK(report.dump().find("recall") != std::string::npos);
  }
  SUBCASE("a different seed gives a different checkpoint") {
    REQUIRE(run({"augment", "--out", out, "--seed", "8"}).code == kExitOk);
    REQUIRE(run({"train", "--out", out, "--seed", "8"}).code == kExitOk);
    CHECK(read_text(dir / "run" / "checkpoint.bin") != ckpt1);
  }
}

TEST_CASE("ablation variants") {
  RunConfig base;
  const auto variants = ablation_variants(base);
  REQUIRE(variants.size() == 6);
  std::vector<std::string> names;
  for (const auto& [name, c] : variants) names.push_back(name);
  CHECK(names == std::vector<std::string>{"full", "w/o-u-i", "w/o-u", "w/o-u&i", "w/o-prune", "w/o-QC"});
  const auto& wo_ui = variants[1].second;
  CHECK(wo_ui.train.aug_sample_rate == 0.0);
  CHECK(variants[2].second.use_aug_user == false);
  CHECK(variants[2].second.use_aug_item == true);
  CHECK(variants[3].second.use_aug_user == false);
  CHECK(variants[3].second.use_aug_item == false);
  CHECK(variants[4].second.train.prune_rate == 0.0);
  CHECK(variants[4].second.train.fr_weight == base.train.fr_weight);
  CHECK(variants[5].second.train.prune_rate == 0.0);
  CHECK(variants[5].second.train.fr_weight == 0.0);
}

TEST_CASE("ablate command emits six rows") {
  testing::TempDir dir("ablate");
  const Result r = run({"ablate", "--out", (dir / "ab").string()});
  REQUIRE(r.code == kExitOk);
  std::ifstream in(dir / "ab" / "ablation.tsv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 7);  // header + six variants
  CHECK(lines[1].rfind("full", 0) == 0);
  CHECK(r.out.find("w/o-QC") != std::string::npos);
  const auto j = nlohmann::json::parse(read_text(dir / "ab" / "ablation.json"));
  CHECK(j.dump().find("w/o-prune") != std::string::npos);
}
