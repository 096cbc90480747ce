#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "afdo/cli.hpp"
#include "afdo/hash.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = afdo::cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

// Unique per-case scratch directory, removed on destruction.
struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("afdo-cli-" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("help exits zero and usage errors exit two") {
  auto help = run({"--help"});
  CHECK(help.code == afdo::cli::kExitOk);
  CHECK(help.out.find("generate") != std::string::npos);
  CHECK(help.out.find("reproduce") != std::string::npos);

  CHECK(run({}).code == afdo::cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == afdo::cli::kExitUsage);
  CHECK(run({"generate", "--scale", "-1"}).code == afdo::cli::kExitUsage);
  auto missing = run({"sweep", "--out", "x"});
  CHECK(missing.code == afdo::cli::kExitUsage);
  CHECK(missing.err.find("usage error") != std::string::npos);
}

TEST_CASE("generate writes the corpus plus a digest-bearing manifest") {
  TempDir dir("generate");
  auto result = run({"generate", "--scale", "0.02", "--out", dir.path.string()});
  CHECK(result.code == afdo::cli::kExitOk);
  CHECK(result.out.find("78 records") != std::string::npos);

  auto corpus_path = dir.path / "corpus.jsonl";
  auto manifest_path = dir.path / "manifest.json";
  REQUIRE(fs::exists(corpus_path));
  REQUIRE(fs::exists(manifest_path));

  auto manifest = nlohmann::json::parse(slurp(manifest_path));
  CHECK(manifest.at("command") == "generate");
  CHECK(manifest.at("seed") == 42);
  bool corpus_listed = false;
  for (const auto& artifact : manifest.at("artifacts")) {
    if (artifact.at("file") == "corpus.jsonl") {
      corpus_listed = true;
      // The digest actually matches the bytes on disk.
      CHECK(artifact.at("sha256") == afdo::sha256_file_hex(corpus_path.string()));
    }
  }
  CHECK(corpus_listed);
}

TEST_CASE("seed comes from flag, then environment, then the default") {
  CHECK(afdo::cli::default_seed() == 42);
  setenv("AFDO_SEED", "777", 1);
  CHECK(afdo::cli::default_seed() == 777);
  setenv("AFDO_SEED", "not-a-number", 1);
  CHECK(afdo::cli::default_seed() == 42);
  unsetenv("AFDO_SEED");

  TempDir env_dir("seed-env");
  TempDir flag_dir("seed-flag");
  TempDir plain_dir("seed-plain");
  setenv("AFDO_SEED", "777", 1);
  auto env_run = run({"generate", "--scale", "0.02", "--out", env_dir.path.string()});
  auto flag_run = run({"generate", "--seed", "777", "--scale", "0.02", "--out",
                       flag_dir.path.string()});
  unsetenv("AFDO_SEED");
  auto plain_run = run({"generate", "--scale", "0.02", "--out", plain_dir.path.string()});
  REQUIRE(env_run.code == afdo::cli::kExitOk);
  REQUIRE(flag_run.code == afdo::cli::kExitOk);
  REQUIRE(plain_run.code == afdo::cli::kExitOk);
  // Env and flag agree; the default seed produces a different corpus.
  CHECK(slurp(env_dir.path / "corpus.jsonl") == slurp(flag_dir.path / "corpus.jsonl"));
  CHECK(slurp(env_dir.path / "corpus.jsonl") != slurp(plain_dir.path / "corpus.jsonl"));
}

TEST_CASE("policy-roundtrip passes on the builtin sample") {
  TempDir dir("policy");
  auto result = run({"policy-roundtrip", "--out", dir.path.string()});
  CHECK(result.code == afdo::cli::kExitOk);
  CHECK(result.out.find("PASS") != std::string::npos);
  auto report = nlohmann::json::parse(slurp(dir.path / "roundtrip.json"));
  CHECK(report.at("byte_stable") == true);
  CHECK(report.at("pass") == true);
  CHECK(report.at("policy_count") == 2);
  for (const auto& policy : report.at("policies")) {
    CHECK(policy.at("behaviourally_equivalent") == true);
    CHECK(policy.at("battery_size") == 45);
  }
  auto canonical = slurp(dir.path / "canonical.ttl");
  CHECK(canonical.find(":TrustThresholdPolicy a afdo:Policy") != std::string::npos);
  CHECK(canonical.find("sh:maxInclusive 0.4 ]") != std::string::npos);
}

TEST_CASE("policy-roundtrip rejects malformed input with exit two") {
  TempDir dir("policy-bad");
  auto bad = dir.path / "bad.ttl";
  {
    std::ofstream out(bad);
    out << "@prefix : <https://w3id.org/afdo/example#> .\n:x a\n";
  }
  auto result = run({"policy-roundtrip", "--in", bad.string(), "--out",
                     (dir.path / "out").string()});
  CHECK(result.code == afdo::cli::kExitUsage);
  CHECK(result.err.find("policy parse error") != std::string::npos);
}

TEST_CASE("sweep and downstream commands run end to end on a small corpus") {
  TempDir dir("sweep");
  auto gen = run({"generate", "--scale", "0.02", "--out", (dir.path / "corpus").string()});
  REQUIRE(gen.code == afdo::cli::kExitOk);
  auto corpus = (dir.path / "corpus" / "corpus.jsonl").string();

  auto sweep = run({"sweep", "--corpus", corpus, "--out", (dir.path / "sweep").string(),
                    "--fractions", "0.0,0.5", "--trials", "2", "--resamples", "100"});
  CHECK(sweep.code == afdo::cli::kExitOk);
  auto csv = slurp(dir.path / "sweep" / "sweep.csv");
  CHECK(csv.rfind("model,fraction,strategy,theta,bucket,n_records,accuracy,ci_low,ci_high\n",
                  0) == 0);
  // 3 models x 2 fractions x 1 strategy = 6 rows + header.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  auto missing = run({"sweep", "--corpus", (dir.path / "nope.jsonl").string(), "--out",
                      (dir.path / "x").string()});
  CHECK(missing.code == afdo::cli::kExitUsage);
}

TEST_CASE("reproduce verifies a deterministic child and rejects bad children") {
  TempDir dir("reproduce");
  auto ok = run({"reproduce", "--workdir", dir.path.string(), "--", "generate", "--scale",
                 "0.02"});
  CHECK(ok.code == afdo::cli::kExitOk);
  CHECK(ok.out.find("PASS:") != std::string::npos);
  CHECK(ok.out.find("files identical across two runs") != std::string::npos);

  CHECK(run({"reproduce", "--workdir", dir.path.string(), "--"}).code ==
        afdo::cli::kExitUsage);
  CHECK(run({"reproduce", "--workdir", dir.path.string(), "--", "reproduce"}).code ==
        afdo::cli::kExitUsage);
}

TEST_CASE("reproduce flags a child that draws entropy outside the seed") {
  TempDir dir("reproduce-canary");
  auto result = run({"reproduce", "--workdir", dir.path.string(), "--", "generate",
                     "--scale", "0.02", "--unseeded-canary"});
  CHECK(result.code == afdo::cli::kExitCheckFailed);
  // The two random draws can share a prefix, so the offset is not pinned.
  CHECK(result.out.find("DIVERGENCE: canary.txt offset ") != std::string::npos);
}
