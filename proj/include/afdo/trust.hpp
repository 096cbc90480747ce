#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "afdo/audit.hpp"
#include "afdo/virtual_time.hpp"

namespace afdo {

// Trust evolution coefficients. Defaults follow the prototype values.
struct TrustParameters {
  double alpha = 0.30;  // validation-confirmed gain
  double beta = 0.05;   // uncertainty / time-decay penalty
  double gamma = 0.20;  // institutional-closure factor
  double rho = 0.40;    // refutation penalty
  double delta = 0.10;  // similar-pattern gain
};

enum class TrustEventKind {
  ValidationConfirmed,
  ValidationRefuted,
  ValidationUncertain,
  SimilarPatternFound,
  TimeDecay,
  InstitutionalClosure,
};

std::string to_string(TrustEventKind k);

struct TrustEvent {
  TrustEventKind kind = TrustEventKind::ValidationConfirmed;
  double delta_years = 0.0;  // TimeDecay only, >= 0
  std::string source;        // originating object or round
};

struct TrustHistoryEntry {
  TrustEvent event;
  double pre_score = 0.0;
  double post_score = 0.0;
  std::size_t audit_record_id = 0;
};

struct TrustState {
  double score = 0.5;
  VirtualTime last_update = 0;
  std::vector<TrustHistoryEntry> history;  // append-only
};

// One update step. Scores are clamped to [0,1]: the increase cases carry the
// min(1, .) cap; decreases are floored at 0 so the score stays a unit-interval
// weight.
double trust_step(double score, const TrustEvent& event, const TrustParameters& params);

// trust_step plus history append and one audit record.
TrustState apply_trust_event(TrustState state, const TrustEvent& event,
                             const TrustParameters& params, AuditLog& log, VirtualTime now);

// Folds the update arithmetic over a schedule; result[0] is the initial
// score, so the trajectory has |schedule| + 1 entries. When a log is given
// the full apply path (history + audit) runs instead of the bare arithmetic;
// both paths produce bitwise-identical trajectories.
std::vector<double> simulate_trust_trajectory(double initial, std::span<const TrustEvent> schedule,
                                              const TrustParameters& params,
                                              AuditLog* log = nullptr);

// Stochastic event mix for the recovery simulator, drawn in the fixed order
// confirmed, refuted, uncertain, similar. Probabilities must sum to 1.
struct TrustEventMix {
  double confirmed = 0.30;
  double refuted = 0.10;
  double uncertain = 0.40;
  double similar = 0.20;
};

void validate_mix(const TrustEventMix& mix);

struct RecoveryResult {
  std::size_t events = 0;    // draws until score >= pre-closure score
  bool censored = false;     // cap reached without recovery
  double final_score = 0.0;  // score when the loop stopped
};

// Injects one InstitutionalClosure, then draws events from the mix until the
// score recovers to the pre-closure level or the cap is hit.
RecoveryResult recovery_time(double initial_score, const TrustEventMix& mix,
                             const TrustParameters& params, std::uint64_t seed,
                             std::size_t cap = 10'000);

// Two-sample Kolmogorov-Smirnov distance (empirical-CDF supremum).
double ks_distance(std::vector<double> a, std::vector<double> b);

struct TrustSweepConfig {
  std::vector<double> alphas = {0.24, 0.30, 0.36};
  std::vector<double> betas = {0.04, 0.05, 0.06};
  std::vector<double> gammas = {0.16, 0.20, 0.24};
  TrustEventMix mix;
  TrustParameters base;  // non-swept coefficients (rho, delta)
  // Below 1.0 so recovery can overshoot: the final-score distribution then
  // actually varies across cells and the KS column is informative.
  double initial_score = 0.90;
  std::size_t replicates = 30;
  std::size_t cap = 10'000;
  std::uint64_t seed = 42;
};

struct TrustSweepCell {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double median_recovery = 0.0;
  double censored_fraction = 0.0;
  double ks_vs_default = 0.0;  // KS of final scores against the default cell
};

// Full alpha x beta x gamma cross product. Replicate seeds are shared across
// cells (common random numbers), which makes recovery time pathwise monotone
// in alpha at fixed seeds.
std::vector<TrustSweepCell> sensitivity_sweep(const TrustSweepConfig& config);

// pid -> trust state with a shared audit log. Writes are serialised per pid
// by the single-writer contract; closed history may be read concurrently.
class TrustRegister {
 public:
  explicit TrustRegister(AuditLog& log) : log_(&log) {}

  void ensure(const std::string& pid, double initial_score);
  const TrustState& state(const std::string& pid) const;
  double apply(const std::string& pid, const TrustEvent& event, const TrustParameters& params,
               VirtualTime now);

 private:
  AuditLog* log_;
  std::map<std::string, TrustState> states_;
};

}  // namespace afdo
