#include "afdo/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "afdo/adversary.hpp"
#include "afdo/corpus.hpp"
#include "afdo/hash.hpp"
#include "afdo/policy.hpp"
#include "afdo/rng.hpp"
#include "afdo/simnet.hpp"
#include "afdo/trust.hpp"

namespace afdo::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Built-in sample policies, used when policy-roundtrip gets no input file.
// ---------------------------------------------------------------------------

constexpr const char* kSamplePolicies = R"ttl(@prefix : <https://w3id.org/afdo/example#> .
@prefix afdo: <https://w3id.org/afdo#> .
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix odrl: <http://www.w3.org/ns/odrl/2/> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .

:TrustThresholdPolicy a afdo:Policy ;
  afdo:policyVersion "1.0" ;
  afdo:condition [
    a sh:NodeShape ;
    sh:targetNode :BRCA1-variant-017 ;
    sh:property [
      sh:path afdo:trustScore ;
      sh:maxInclusive 0.40 ]
  ] ;
  afdo:action afdo:seekClinicalValidation ;
  odrl:duty [
    a odrl:Duty ;
    odrl:action odrl:rateLimit ;
    odrl:constraint [
      odrl:leftOperand odrl:elapsedTime ;
      odrl:operator odrl:gteq ;
      odrl:rightOperand "P1D"^^xsd:duration ]
  ] .

:ConflictNegotiationPolicy a afdo:Policy ;
  afdo:policyVersion "1.0" ;
  afdo:condition [
    a sh:NodeShape ;
    sh:targetClass afdo:GeneticVariantInterpretation ;
    sh:property [
      sh:path afdo:variantId ;
      sh:equals [ sh:path :announced/afdo:variantId ] ] ;
    sh:property [
      sh:path afdo:classification ;
      sh:not [ sh:equals [ sh:path :announced/afdo:classification ] ] ]
  ] ;
  afdo:action afdo:negotiateClassification ;
  odrl:duty [
    a odrl:Duty ;
    odrl:action odrl:notify ;
    odrl:assignee afdo:TrustRegister
  ] .
)ttl";

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << content;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Relative regular-file paths under root, lexicographically sorted with '/'
// separators so the order is platform independent.
std::vector<std::string> sorted_relative_files(const fs::path& root) {
  std::vector<std::string> files;
  for (const fs::directory_entry& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files.push_back(entry.path().lexically_relative(root).generic_string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// One manifest per output directory: the seed, a config echo and digests of
// every artifact, enough to re-run the command bit-identically. Paths are
// relative so two runs into different directories stay byte-identical.
void write_manifest(const fs::path& out_dir, const std::string& command,
                    std::uint64_t seed, const nlohmann::ordered_json& config,
                    const nlohmann::ordered_json& inputs) {
  nlohmann::ordered_json manifest;
  manifest["command"] = command;
  manifest["seed"] = seed;
  manifest["config"] = config;
  manifest["inputs"] = inputs;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
  for (const std::string& file : sorted_relative_files(out_dir)) {
    if (file == "manifest.json") {
      continue;
    }
    const fs::path full = out_dir / fs::path(file);
    nlohmann::ordered_json entry;
    entry["file"] = file;
    entry["sha256"] = sha256_file_hex(full.string());
    entry["bytes"] = fs::file_size(full);
    artifacts.push_back(std::move(entry));
  }
  manifest["artifacts"] = artifacts;
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

nlohmann::ordered_json input_digest(const fs::path& path) {
  nlohmann::ordered_json entry;
  entry["file"] = path.filename().generic_string();
  entry["sha256"] = sha256_file_hex(path.string());
  return entry;
}

std::vector<ConflictRecord> load_corpus(const fs::path& path) {
  if (!fs::exists(path)) {
    throw std::runtime_error("corpus file not found: " + path.string());
  }
  return read_corpus_file(path.string());
}

// ---------------------------------------------------------------------------
// Command bodies (shared between direct invocation and the pipeline)
// ---------------------------------------------------------------------------

int do_generate(double scale, std::uint64_t seed, const fs::path& out_dir,
                bool unseeded_canary, std::ostream& out) {
  const CorpusSpec spec = default_corpus_spec(scale, seed);
  const std::vector<ConflictRecord> records = generate_corpus(spec);
  fs::create_directories(out_dir);
  const fs::path corpus_path = out_dir / "corpus.jsonl";
  write_corpus_file(records, corpus_path.string());
  if (unseeded_canary) {
    // Intentionally nondeterministic output for exercising the reproducibility
    // checker's failure path.
    write_text(out_dir / "canary.txt",
               std::to_string(std::random_device{}()) + "\n");
  }
  nlohmann::ordered_json config;
  config["scale"] = scale;
  config["bucket_counts"] = spec.bucket_counts;
  config["mean_submissions"] = spec.mean_submissions;
  config["min_submissions"] = spec.min_submissions;
  config["max_submissions"] = spec.max_submissions;
  write_manifest(out_dir, "generate", seed, config, nlohmann::ordered_json::array());
  out << "wrote " << corpus_path.generic_string() << " (" << records.size()
      << " records)\n";
  return kExitOk;
}

int do_sweep(const fs::path& corpus_path, const SweepConfig& config,
             const fs::path& out_dir, std::ostream& out) {
  const std::vector<ConflictRecord> corpus = load_corpus(corpus_path);
  const std::vector<SweepCell> cells = run_sweep(corpus, config);
  fs::create_directories(out_dir);
  write_text(out_dir / "sweep.csv", sweep_to_csv(cells));

  nlohmann::ordered_json echo;
  echo["theta"] = config.theta;
  echo["trials"] = config.trials;
  nlohmann::ordered_json strategies = nlohmann::ordered_json::array();
  for (const Strategy s : config.strategies) strategies.push_back(to_string(s));
  echo["strategies"] = strategies;
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (const AttackModel m : config.models) models.push_back(to_string(m));
  echo["models"] = models;
  echo["fractions"] = config.fractions;
  echo["bootstrap_resamples"] = config.bootstrap_resamples;
  echo["bootstrap_level"] = config.bootstrap_level;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  inputs.push_back(input_digest(corpus_path));
  write_manifest(out_dir, "sweep", config.seed, echo, inputs);
  out << "wrote " << (out_dir / "sweep.csv").generic_string() << " ("
      << cells.size() << " cells)\n";
  return kExitOk;
}

int do_ablation(const fs::path& corpus_path, double theta, std::uint64_t seed,
                const fs::path& out_dir, std::ostream& out) {
  const std::vector<ConflictRecord> corpus = load_corpus(corpus_path);
  const std::vector<AblationCell> cells = run_ablation(corpus, theta, seed);
  fs::create_directories(out_dir);
  write_text(out_dir / "ablation.csv", ablation_to_csv(cells, theta));
  nlohmann::ordered_json config;
  config["theta"] = theta;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  inputs.push_back(input_digest(corpus_path));
  write_manifest(out_dir, "ablation", seed, config, inputs);
  out << "wrote " << (out_dir / "ablation.csv").generic_string() << " ("
      << cells.size() << " rows)\n";
  return kExitOk;
}

int do_sensitivity(const fs::path& corpus_path, const std::vector<double>& grid,
                   std::uint64_t seed, const fs::path& out_dir, std::ostream& out) {
  const std::vector<ConflictRecord> corpus = load_corpus(corpus_path);
  const std::vector<ThetaCell> cells = run_theta_sensitivity(corpus, grid, seed);
  fs::create_directories(out_dir);
  write_text(out_dir / "theta_sensitivity.csv", theta_to_csv(cells));
  nlohmann::ordered_json config;
  config["theta_grid"] = grid;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  inputs.push_back(input_digest(corpus_path));
  write_manifest(out_dir, "sensitivity", seed, config, inputs);
  out << "wrote " << (out_dir / "theta_sensitivity.csv").generic_string() << " ("
      << cells.size() << " rows)\n";
  return kExitOk;
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

int do_trust_sweep(const TrustSweepConfig& config, const fs::path& out_dir,
                   std::ostream& out) {
  const std::vector<TrustSweepCell> cells = sensitivity_sweep(config);
  std::string csv = "alpha,beta,gamma,median_recovery,censored_fraction,ks_vs_default\n";
  for (const TrustSweepCell& cell : cells) {
    csv += fixed(cell.alpha, 2) + "," + fixed(cell.beta, 2) + "," +
           fixed(cell.gamma, 2) + "," + fixed(cell.median_recovery, 1) + "," +
           fixed(cell.censored_fraction, 6) + "," + fixed(cell.ks_vs_default, 6) + "\n";
  }
  fs::create_directories(out_dir);
  write_text(out_dir / "trust_sweep.csv", csv);
  nlohmann::ordered_json echo;
  echo["alphas"] = config.alphas;
  echo["betas"] = config.betas;
  echo["gammas"] = config.gammas;
  echo["replicates"] = config.replicates;
  echo["initial_score"] = config.initial_score;
  echo["cap"] = config.cap;
  write_manifest(out_dir, "trust-sweep", config.seed, echo,
                 nlohmann::ordered_json::array());
  out << "wrote " << (out_dir / "trust_sweep.csv").generic_string() << " ("
      << cells.size() << " cells)\n";
  return kExitOk;
}

nlohmann::ordered_json comparison_json(const EquivalenceReport& report) {
  nlohmann::ordered_json j;
  j["count_match"] = report.count_match;
  j["all_equal"] = report.all_equal;
  nlohmann::ordered_json mismatches = nlohmann::ordered_json::array();
  for (const RecordComparison& comparison : report.per_record) {
    if (!comparison.equal) {
      nlohmann::ordered_json entry;
      entry["pid"] = comparison.pid;
      entry["first_diff_offset"] = comparison.first_diff_offset.value_or(0);
      mismatches.push_back(std::move(entry));
    }
  }
  j["mismatches"] = mismatches;
  return j;
}

int do_simnet(const fs::path& corpus_path, std::size_t record_limit,
              std::uint64_t seed, const fs::path& out_dir, std::ostream& out) {
  std::vector<ConflictRecord> corpus = load_corpus(corpus_path);
  if (corpus.size() > record_limit) {
    corpus.resize(record_limit);
  }
  const std::vector<NodeSpec> nodes = default_nodes();
  constexpr ExecutionMode kModes[] = {ExecutionMode::Centralised,
                                      ExecutionMode::DistributedNoLatency,
                                      ExecutionMode::DistributedWithLatency};
  fs::create_directories(out_dir);
  std::vector<WorkloadResult> results;
  for (const ExecutionMode mode : kModes) {
    AuditLog log;
    const std::optional<LatencyModel> latency =
        mode == ExecutionMode::DistributedWithLatency
            ? std::optional<LatencyModel>(LatencyModel{})
            : std::nullopt;
    results.push_back(run_workload(corpus, mode, nodes, latency, seed, log));
    write_snapshots_file(results.back().snapshots,
                         (out_dir / ("snapshots_" + to_string(mode) + ".jsonl")).string());
  }
  write_text(out_dir / "timing.csv", timing_to_csv(results));

  const EquivalenceReport no_latency =
      compare_snapshots(results[0].snapshots, results[1].snapshots);
  const EquivalenceReport with_latency =
      compare_snapshots(results[0].snapshots, results[2].snapshots);
  const bool pass = no_latency.all_equal && with_latency.all_equal;

  nlohmann::ordered_json report;
  report["records"] = corpus.size();
  report["mask"] = kDefaultMask;
  report["centralised_vs_distributed_no_latency"] = comparison_json(no_latency);
  report["centralised_vs_distributed_with_latency"] = comparison_json(with_latency);
  report["pass"] = pass;
  write_text(out_dir / "equivalence.json", report.dump(2) + "\n");

  nlohmann::ordered_json config;
  config["records"] = corpus.size();
  config["nodes"] = nodes.size();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  inputs.push_back(input_digest(corpus_path));
  write_manifest(out_dir, "simnet", seed, config, inputs);

  out << "simnet equivalence over " << corpus.size() << " records: "
      << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitCheckFailed;
}

int do_policy_roundtrip(const std::optional<fs::path>& in_path, std::size_t battery_size,
                        std::uint64_t seed, const fs::path& out_dir,
                        std::ostream& out) {
  const std::string text =
      in_path.has_value() ? read_text(*in_path) : std::string(kSamplePolicies);
  const PolicyDocument first = parse_policy_document(text);
  const std::string canonical = serialise_policy_document(first);
  const PolicyDocument second = parse_policy_document(canonical);
  const std::string canonical_again = serialise_policy_document(second);
  const bool byte_stable = canonical == canonical_again;

  bool behaviour_ok = first.policies.size() == second.policies.size();
  nlohmann::ordered_json policies = nlohmann::ordered_json::array();
  if (behaviour_ok) {
    for (std::size_t i = 0; i < first.policies.size(); ++i) {
      const Policy& a = first.policies[i];
      const std::vector<EvalInput> battery =
          build_eval_battery(a, battery_size, derive_seed(seed, "battery-" + a.id));
      const bool equivalent = behaviourally_equivalent(a, second.policies[i], battery);
      behaviour_ok = behaviour_ok && equivalent;
      nlohmann::ordered_json entry;
      entry["id"] = a.id;
      entry["battery_size"] = battery.size();
      entry["behaviourally_equivalent"] = equivalent;
      policies.push_back(std::move(entry));
    }
  }
  const bool pass = byte_stable && behaviour_ok;

  fs::create_directories(out_dir);
  write_text(out_dir / "canonical.ttl", canonical);
  nlohmann::ordered_json report;
  report["byte_stable"] = byte_stable;
  report["policy_count"] = first.policies.size();
  report["policies"] = policies;
  report["pass"] = pass;
  write_text(out_dir / "roundtrip.json", report.dump(2) + "\n");

  nlohmann::ordered_json config;
  config["battery_size"] = battery_size;
  config["builtin_sample"] = !in_path.has_value();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  if (in_path.has_value()) {
    inputs.push_back(input_digest(*in_path));
  }
  write_manifest(out_dir, "policy-roundtrip", seed, config, inputs);

  out << "policy round-trip (" << first.policies.size()
      << " policies): " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitCheckFailed;
}

int do_pipeline(double scale, std::uint64_t seed, const fs::path& out_dir,
                std::ostream& out) {
  int rc = do_generate(scale, seed, out_dir / "corpus", false, out);
  if (rc != kExitOk) return rc;
  const fs::path corpus_path = out_dir / "corpus" / "corpus.jsonl";

  SweepConfig sweep;
  sweep.seed = seed;
  rc = do_sweep(corpus_path, sweep, out_dir / "sweep", out);
  if (rc != kExitOk) return rc;

  rc = do_ablation(corpus_path, 0.20, seed, out_dir / "ablation", out);
  if (rc != kExitOk) return rc;

  rc = do_sensitivity(corpus_path,
                      std::vector<double>(std::begin(kThetaGrid), std::end(kThetaGrid)),
                      seed, out_dir / "sensitivity", out);
  if (rc != kExitOk) return rc;

  TrustSweepConfig trust;
  trust.seed = seed;
  rc = do_trust_sweep(trust, out_dir / "trust", out);
  if (rc != kExitOk) return rc;

  rc = do_simnet(corpus_path, 100, seed, out_dir / "simnet", out);
  if (rc != kExitOk) return rc;

  rc = do_policy_roundtrip(std::nullopt, 45, seed, out_dir / "policy", out);
  if (rc != kExitOk) return rc;

  nlohmann::ordered_json config;
  config["scale"] = scale;
  write_manifest(out_dir, "pipeline", seed, config, nlohmann::ordered_json::array());
  out << "pipeline complete under " << out_dir.generic_string() << "\n";
  return kExitOk;
}

int do_reproduce(const std::vector<std::string>& child, const fs::path& workdir,
                 std::ostream& out, std::ostream& err) {
  if (child.empty()) {
    err << "reproduce needs a child command after --\n";
    return kExitUsage;
  }
  if (child.front() == "reproduce") {
    err << "reproduce cannot re-run itself\n";
    return kExitUsage;
  }
  const fs::path run_a = workdir / "run-a";
  const fs::path run_b = workdir / "run-b";
  for (const fs::path& run_dir : {run_a, run_b}) {
    fs::remove_all(run_dir);
    std::vector<std::string> args = child;
    args.push_back("--out");
    args.push_back(run_dir.string());
    std::ostringstream child_out;  // paths in child chatter differ per run
    const int rc = run_command(args, child_out, err);
    if (rc != kExitOk) {
      err << "child command failed with exit code " << rc << "\n";
      return rc;
    }
  }
  const std::vector<std::string> files_a = sorted_relative_files(run_a);
  const std::vector<std::string> files_b = sorted_relative_files(run_b);
  if (files_a != files_b) {
    for (std::size_t i = 0; i < std::max(files_a.size(), files_b.size()); ++i) {
      const std::string left = i < files_a.size() ? files_a[i] : "<missing>";
      const std::string right = i < files_b.size() ? files_b[i] : "<missing>";
      if (left != right) {
        out << "DIVERGENCE: file lists differ (" << left << " vs " << right << ")\n";
        break;
      }
    }
    return kExitCheckFailed;
  }
  for (const std::string& file : files_a) {
    const std::string a = read_text(run_a / fs::path(file));
    const std::string b = read_text(run_b / fs::path(file));
    if (a != b) {
      const std::size_t limit = std::min(a.size(), b.size());
      std::size_t offset = limit;
      for (std::size_t i = 0; i < limit; ++i) {
        if (a[i] != b[i]) {
          offset = i;
          break;
        }
      }
      out << "DIVERGENCE: " << file << " offset " << offset << "\n";
      return kExitCheckFailed;
    }
  }
  out << "PASS: " << files_a.size() << " files identical across two runs\n";
  return kExitOk;
}

}  // namespace

std::uint64_t default_seed() {
  if (const char* env = std::getenv("AFDO_SEED")) {
    std::uint64_t value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size()) {
      return value;
    }
  }
  return 42;
}

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"autonomous digital-object decision stack"};
  app.name("afdo");
  app.require_subcommand(1);

  std::uint64_t seed = default_seed();
  app.add_option("--seed", seed, "global random seed")->capture_default_str();

  double gen_scale = 0.1;
  std::string gen_out = "out";
  bool gen_canary = false;
  CLI::App* generate = app.add_subcommand("generate", "write a synthetic conflict corpus");
  generate->fallthrough();
  generate->add_option("--scale", gen_scale, "corpus scale factor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  generate->add_option("--out", gen_out, "output directory")->capture_default_str();
  generate->add_flag("--unseeded-canary", gen_canary)->group("");

  std::string sweep_corpus;
  std::string sweep_out = "out";
  SweepConfig sweep_config;
  std::vector<std::string> sweep_strategies = {"twm"};
  std::vector<std::string> sweep_models = {"sybil", "collusion", "poisoning"};
  CLI::App* sweep = app.add_subcommand("sweep", "adversarial accuracy sweep");
  sweep->fallthrough();
  sweep->add_option("--corpus", sweep_corpus, "corpus JSONL file")->required();
  sweep->add_option("--out", sweep_out, "output directory")->capture_default_str();
  sweep->add_option("--theta", sweep_config.theta, "trim fraction")->capture_default_str();
  sweep->add_option("--trials", sweep_config.trials, "attack trials per cell")
      ->capture_default_str();
  sweep->add_option("--strategies", sweep_strategies, "strategies (twm,majority,first_wins)")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--models", sweep_models, "attack models")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--fractions", sweep_config.fractions, "adversarial fractions")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--resamples", sweep_config.bootstrap_resamples, "bootstrap resamples")
      ->capture_default_str();

  std::string ablation_corpus;
  std::string ablation_out = "out";
  double ablation_theta = 0.20;
  CLI::App* ablation = app.add_subcommand("ablation", "strategy ablation by bucket");
  ablation->fallthrough();
  ablation->add_option("--corpus", ablation_corpus, "corpus JSONL file")->required();
  ablation->add_option("--out", ablation_out, "output directory")->capture_default_str();
  ablation->add_option("--theta", ablation_theta, "trim fraction")->capture_default_str();

  std::string sens_corpus;
  std::string sens_out = "out";
  std::vector<double> sens_grid(std::begin(kThetaGrid), std::end(kThetaGrid));
  CLI::App* sensitivity = app.add_subcommand("sensitivity", "trim-fraction sensitivity");
  sensitivity->fallthrough();
  sensitivity->add_option("--corpus", sens_corpus, "corpus JSONL file")->required();
  sensitivity->add_option("--out", sens_out, "output directory")->capture_default_str();
  sensitivity->add_option("--theta-grid", sens_grid, "theta values")
      ->delimiter(',')
      ->capture_default_str();

  std::string trust_out = "out";
  TrustSweepConfig trust_config;
  CLI::App* trust = app.add_subcommand("trust-sweep", "trust-recovery sensitivity sweep");
  trust->fallthrough();
  trust->add_option("--out", trust_out, "output directory")->capture_default_str();
  trust->add_option("--alphas", trust_config.alphas, "alpha grid")
      ->delimiter(',')
      ->capture_default_str();
  trust->add_option("--betas", trust_config.betas, "beta grid")
      ->delimiter(',')
      ->capture_default_str();
  trust->add_option("--gammas", trust_config.gammas, "gamma grid")
      ->delimiter(',')
      ->capture_default_str();
  trust->add_option("--replicates", trust_config.replicates, "replicates per cell")
      ->capture_default_str();
  trust->add_option("--initial", trust_config.initial_score, "initial trust score")
      ->capture_default_str();

  std::string simnet_corpus;
  std::string simnet_out = "out";
  std::size_t simnet_records = 100;
  CLI::App* simnet = app.add_subcommand("simnet", "virtual-time execution equivalence");
  simnet->fallthrough();
  simnet->add_option("--corpus", simnet_corpus, "corpus JSONL file")->required();
  simnet->add_option("--out", simnet_out, "output directory")->capture_default_str();
  simnet->add_option("--records", simnet_records, "workload size")->capture_default_str();

  std::string policy_in;
  std::string policy_out = "out";
  std::size_t policy_battery = 45;
  CLI::App* policy = app.add_subcommand("policy-roundtrip", "parse/serialise round-trip check");
  policy->fallthrough();
  policy->add_option("--in", policy_in, "policy Turtle file (built-in sample when omitted)");
  policy->add_option("--out", policy_out, "output directory")->capture_default_str();
  policy->add_option("--battery", policy_battery, "evaluation inputs per policy")
      ->capture_default_str();

  double pipeline_scale = 0.1;
  std::string pipeline_out = "out";
  CLI::App* pipeline = app.add_subcommand("pipeline", "generate + all reports in one directory");
  pipeline->fallthrough();
  pipeline->add_option("--scale", pipeline_scale, "corpus scale factor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  pipeline->add_option("--out", pipeline_out, "output directory")->capture_default_str();

  std::string reproduce_workdir = "reproduce-out";
  std::vector<std::string> reproduce_child;
  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "run a child command twice and compare outputs byte-for-byte");
  reproduce->fallthrough();
  reproduce->add_option("--workdir", reproduce_workdir, "directory for the two runs")
      ->capture_default_str();
  reproduce->add_option("child", reproduce_child, "child command, usually after --");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (generate->parsed()) {
      return do_generate(gen_scale, seed, gen_out, gen_canary, out);
    }
    if (sweep->parsed()) {
      sweep_config.seed = seed;
      sweep_config.strategies.clear();
      for (const std::string& name : sweep_strategies) {
        sweep_config.strategies.push_back(strategy_from_string(name));
      }
      sweep_config.models.clear();
      for (const std::string& name : sweep_models) {
        sweep_config.models.push_back(attack_model_from_string(name));
      }
      return do_sweep(sweep_corpus, sweep_config, sweep_out, out);
    }
    if (ablation->parsed()) {
      return do_ablation(ablation_corpus, ablation_theta, seed, ablation_out, out);
    }
    if (sensitivity->parsed()) {
      return do_sensitivity(sens_corpus, sens_grid, seed, sens_out, out);
    }
    if (trust->parsed()) {
      trust_config.seed = seed;
      return do_trust_sweep(trust_config, trust_out, out);
    }
    if (simnet->parsed()) {
      return do_simnet(simnet_corpus, simnet_records, seed, simnet_out, out);
    }
    if (policy->parsed()) {
      const std::optional<fs::path> in_path =
          policy_in.empty() ? std::nullopt : std::optional<fs::path>(policy_in);
      return do_policy_roundtrip(in_path, policy_battery, seed, policy_out, out);
    }
    if (pipeline->parsed()) {
      return do_pipeline(pipeline_scale, seed, pipeline_out, out);
    }
    if (reproduce->parsed()) {
      return do_reproduce(reproduce_child, reproduce_workdir, out, err);
    }
  } catch (const ParseError& e) {
    err << "policy parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << "no subcommand selected\n";
  return kExitUsage;
}

}  // namespace afdo::cli
