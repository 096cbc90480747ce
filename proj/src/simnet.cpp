#include "afdo/simnet.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "afdo/rng.hpp"

namespace afdo {

std::vector<NodeSpec> default_nodes() {
  return {
      {"node-eu-1", "eu-west"},   {"node-eu-2", "eu-west"},
      {"node-us-1", "us-east"},   {"node-ap-1", "ap-south"},
      {"node-sa-1", "sa-east"},
  };
}

VirtualTime LatencyModel::sample(Rng& rng) const {
  const double rtt = rng.normal(mean_rtt_ms, sd_rtt_ms);
  return rtt <= 0.0 ? VirtualTime{0}
                    : static_cast<VirtualTime>(std::llround(rtt));
}

std::string to_string(ExecutionMode mode) {
  switch (mode) {
    case ExecutionMode::Centralised: return "centralised";
    case ExecutionMode::DistributedNoLatency: return "distributed_no_latency";
    case ExecutionMode::DistributedWithLatency: return "distributed_with_latency";
  }
  throw std::invalid_argument("unknown execution mode value");
}

ExecutionMode execution_mode_from_string(const std::string& text) {
  if (text == "centralised") return ExecutionMode::Centralised;
  if (text == "distributed_no_latency") return ExecutionMode::DistributedNoLatency;
  if (text == "distributed_with_latency") return ExecutionMode::DistributedWithLatency;
  throw std::invalid_argument("unknown execution mode: " + text);
}

std::string RecordSnapshot::canonical_json(const std::vector<std::string>& masked) const {
  nlohmann::ordered_json j;
  j["pid"] = pid;
  j["fdo_type"] = fdo_type;
  j["state"] = state;
  j["trust_score"] = trust_score;
  j["operation_history"] = operation_history;
  j["created_at"] = created_at;
  for (const std::string& field : masked) {
    if (j.contains(field)) {
      j[field] = "MASKED";
    }
  }
  return j.dump();
}

namespace {

// Virtual per-operation costs in milliseconds. Arbitrary but fixed; the
// equivalence check masks everything time-derived, so these only shape the
// timing CSV.
constexpr VirtualTime kCreateCostMs = 5;
constexpr VirtualTime kAnnounceCostMs = 2;
constexpr VirtualTime kValidateCostMs = 10;
constexpr VirtualTime kReconcileCostMs = 8;
constexpr VirtualTime kTrustCostMs = 1;

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) {
    return sorted.back();
  }
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

WorkloadResult run_workload(const std::vector<ConflictRecord>& records,
                            ExecutionMode mode, const std::vector<NodeSpec>& nodes,
                            const std::optional<LatencyModel>& latency,
                            std::uint64_t seed, AuditLog& log,
                            const ConsensusConfig& consensus,
                            const TrustParameters& trust) {
  const bool distributed = mode != ExecutionMode::Centralised;
  if (distributed && nodes.empty()) {
    throw std::invalid_argument("distributed modes need at least one node");
  }
  const bool with_latency = mode == ExecutionMode::DistributedWithLatency;
  const LatencyModel latency_model = latency.value_or(LatencyModel{});

  WorkloadResult result;
  result.mode = mode;

  // Node clocks; centralised execution is one clock.
  std::vector<VirtualTime> clocks(distributed ? nodes.size() : 1, 0);

  struct Pending {
    Classification consensus_class = Classification::VUS;
    bool reconciled = false;
  };
  std::vector<Pending> pending;
  std::vector<double> durations;

  for (std::size_t i = 0; i < records.size(); ++i) {
    const ConflictRecord& record = records[i];
    const std::size_t node_index = distributed ? i % nodes.size() : 0;
    const std::string node_id = distributed ? nodes[node_index].node_id : "central";
    VirtualTime& clock = clocks[node_index];
    const VirtualTime started = clock;

    // Latency draws are keyed per record so every record replays in
    // isolation; draw order is announce RTT, per-submission RTT, reconcile
    // RTT.
    Rng rng(derive_seed(seed, "latency-" + record.target_id));

    clock += kCreateCostMs;
    const VirtualTime created_at = clock;
    result.trace.push_back({clock, node_id, "create", record.target_id});

    clock += kAnnounceCostMs;
    if (with_latency) {
      clock += latency_model.sample(rng);
    }
    result.trace.push_back({clock, node_id, "announce", record.target_id});

    const VirtualTime round_start = clock;
    std::vector<TimedSubmission> arrivals;
    arrivals.reserve(record.submissions.size());
    VirtualTime slowest = 0;
    for (const Submission& s : record.submissions) {
      const VirtualTime offset = with_latency ? latency_model.sample(rng) : 0;
      slowest = std::max(slowest, offset);
      arrivals.push_back(TimedSubmission{s, round_start + offset});
    }
    const std::optional<ConsensusOutcome> outcome =
        run_round(record.target_id, arrivals, consensus, log, round_start);
    if (!outcome.has_value()) {
      throw std::logic_error("workload round closed void for " + record.target_id);
    }
    clock += kValidateCostMs + slowest;
    result.trace.push_back({clock, node_id, "validate", record.target_id});

    Pending p;
    p.consensus_class = outcome->consensus_class;
    p.reconciled = outcome->consensus_class != record.ground_truth.classification;
    if (p.reconciled) {
      clock += kReconcileCostMs;
      if (with_latency) {
        clock += latency_model.sample(rng);
      }
      result.trace.push_back({clock, node_id, "reconcile", record.target_id});
    }
    pending.push_back(p);
    durations.push_back(static_cast<double>(clock - started));

    RecordSnapshot snapshot;
    snapshot.pid = record.target_id;
    snapshot.fdo_type = "GeneticVariantInterpretation";
    snapshot.state = p.reconciled ? "reconciled" : "validated";
    snapshot.operation_history = {"CREATE", "ANNOUNCE", "VALIDATE"};
    if (p.reconciled) {
      snapshot.operation_history.push_back("RECONCILE");
    }
    snapshot.operation_history.push_back("UPDATETRUST");
    snapshot.created_at = created_at;
    result.snapshots.push_back(std::move(snapshot));
  }

  // Trust evolution runs as a centralised post-process in corpus order, after
  // every node clock has drained, so scores cannot depend on node interleaving.
  VirtualTime cursor = 0;
  for (const VirtualTime clock : clocks) {
    cursor = std::max(cursor, clock);
  }
  TrustRegister registry(log);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ConflictRecord& record = records[i];
    cursor += kTrustCostMs;
    TrustEvent event;
    event.kind = pending[i].reconciled ? TrustEventKind::ValidationUncertain
                                       : TrustEventKind::ValidationConfirmed;
    event.source = record.target_id;
    registry.ensure(record.target_id, 0.5);
    result.snapshots[i].trust_score =
        registry.apply(record.target_id, event, trust, cursor);
    result.trace.push_back({cursor, "central", "trust_update", record.target_id});
  }

  result.virtual_wall_clock = cursor;
  if (!durations.empty()) {
    std::sort(durations.begin(), durations.end());
    result.p95_per_record_ms = quantile_sorted(durations, 0.95);
  }
  return result;
}

EquivalenceReport compare_snapshots(const std::vector<RecordSnapshot>& a,
                                    const std::vector<RecordSnapshot>& b,
                                    const std::vector<std::string>& masked) {
  EquivalenceReport report;
  report.count_match = a.size() == b.size();
  report.all_equal = report.count_match;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    RecordComparison comparison;
    comparison.pid = a[i].pid;
    const std::string left = a[i].canonical_json(masked);
    const std::string right = b[i].canonical_json(masked);
    if (left == right) {
      comparison.equal = true;
    } else {
      comparison.equal = false;
      const std::size_t limit = std::min(left.size(), right.size());
      std::size_t offset = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        if (left[j] != right[j]) {
          offset = j;
          break;
        }
      }
      comparison.first_diff_offset = offset;
      report.all_equal = false;
    }
    report.per_record.push_back(std::move(comparison));
  }
  return report;
}

std::string timing_to_csv(const std::vector<WorkloadResult>& results) {
  std::string out = "mode,records,virtual_wall_clock_ms,p95_per_record_ms\n";
  for (const WorkloadResult& result : results) {
    char p95[32];
    std::snprintf(p95, sizeof(p95), "%.3f", result.p95_per_record_ms);
    out += to_string(result.mode) + "," + std::to_string(result.snapshots.size()) +
           "," + std::to_string(result.virtual_wall_clock) + "," + p95 + "\n";
  }
  return out;
}

void write_snapshots_file(const std::vector<RecordSnapshot>& snapshots,
                          const std::string& path,
                          const std::vector<std::string>& masked) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open snapshot file for writing: " + path);
  }
  for (const RecordSnapshot& snapshot : snapshots) {
    out << snapshot.canonical_json(masked) << '\n';
  }
}

}  // namespace afdo
