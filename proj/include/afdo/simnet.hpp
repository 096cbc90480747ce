#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afdo/audit.hpp"
#include "afdo/consensus.hpp"
#include "afdo/core_model.hpp"
#include "afdo/trust.hpp"
#include "afdo/virtual_time.hpp"

namespace afdo {

// ---------------------------------------------------------------------------
// Topology and latency
// ---------------------------------------------------------------------------

struct NodeSpec {
  std::string node_id;
  std::string region;
};

// Five nodes across four regions.
std::vector<NodeSpec> default_nodes();

struct LatencyModel {
  double mean_rtt_ms = 144.0;
  double sd_rtt_ms = 55.0;

  // Normal(mean, sd) clamped at 0, rounded to whole milliseconds.
  VirtualTime sample(class Rng& rng) const;
};

enum class ExecutionMode { Centralised, DistributedNoLatency, DistributedWithLatency };

std::string to_string(ExecutionMode mode);
ExecutionMode execution_mode_from_string(const std::string& text);

// ---------------------------------------------------------------------------
// Workload execution
// ---------------------------------------------------------------------------

// Node assignment lives in the trace, not the snapshot, so snapshots are
// comparable across modes with only time-derived fields masked.
struct RecordSnapshot {
  std::string pid;
  std::string fdo_type;
  std::string state;  // lifecycle state after creation + evolution
  double trust_score = 0.5;
  std::vector<std::string> operation_history;
  VirtualTime created_at = 0;  // time-derived, masked in comparisons

  // Canonical single-line JSON with masked fields replaced by "MASKED".
  std::string canonical_json(const std::vector<std::string>& masked) const;
};

struct TraceEntry {
  VirtualTime timestamp = 0;
  std::string node_id;
  std::string action;
  std::string pid;
};

struct WorkloadResult {
  ExecutionMode mode = ExecutionMode::Centralised;
  std::vector<RecordSnapshot> snapshots;
  std::vector<TraceEntry> trace;
  VirtualTime virtual_wall_clock = 0;
  double p95_per_record_ms = 0.0;
};

// Creates one object per conflict record, round-robin across nodes in the
// distributed modes, then runs consensus plus one trust update per record as
// a centralised post-process. Virtual time only.
WorkloadResult run_workload(const std::vector<ConflictRecord>& records,
                            ExecutionMode mode, const std::vector<NodeSpec>& nodes,
                            const std::optional<LatencyModel>& latency,
                            std::uint64_t seed, AuditLog& log,
                            const ConsensusConfig& consensus = {},
                            const TrustParameters& trust = {});

// ---------------------------------------------------------------------------
// Equivalence checking
// ---------------------------------------------------------------------------

inline const std::vector<std::string> kDefaultMask = {"created_at"};

struct RecordComparison {
  std::string pid;
  bool equal = false;
  // Byte offset of the first difference between the canonical lines.
  std::optional<std::size_t> first_diff_offset;
};

struct EquivalenceReport {
  bool count_match = false;
  bool all_equal = false;
  std::vector<RecordComparison> per_record;
};

EquivalenceReport compare_snapshots(const std::vector<RecordSnapshot>& a,
                                    const std::vector<RecordSnapshot>& b,
                                    const std::vector<std::string>& masked = kDefaultMask);

// CSV: mode,records,virtual_wall_clock_ms,p95_per_record_ms
std::string timing_to_csv(const std::vector<WorkloadResult>& results);

void write_snapshots_file(const std::vector<RecordSnapshot>& snapshots,
                          const std::string& path,
                          const std::vector<std::string>& masked = kDefaultMask);

}  // namespace afdo
