#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afdo/audit.hpp"
#include "afdo/core_model.hpp"
#include "afdo/virtual_time.hpp"

namespace afdo {

enum class Strategy { TrimmedWeightedMean, SimpleMajority, FirstWins };

std::string to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

// k = max(1, floor(theta*n)) per the main definition; the ceiling variant is
// selectable for comparison. Both fall back to k = 0 (trim skipped) when the
// trim would leave no survivor.
enum class TrimRule { Floor, Ceil };

struct ConsensusConfig {
  double theta = 0.20;
  Strategy strategy = Strategy::TrimmedWeightedMean;
  DurationMs round_timeout{60'000};
  TrimRule trim_rule = TrimRule::Floor;
  MidpointTie midpoint_tie = MidpointTie::TowardLower;
  std::string policy_version = "consensus-v1";
};

// Trimmed elements per side. Requires n >= 1 and 0 < theta < 0.5.
std::size_t trim_count(std::size_t n, double theta, TrimRule rule = TrimRule::Floor);

struct Interpretation {
  std::string target_id;
  Classification classification;
};

// True iff same target, different classification.
bool detect_conflict(const Interpretation& a, const Interpretation& b);

// Outcome of one aggregation, with enough audit detail for independent
// re-verification: which inputs were trimmed, which survived, and the
// weights in effect. Indices refer to the caller's submission order.
struct ConsensusOutcome {
  double consensus_score = 0.0;
  Classification consensus_class = Classification::VUS;
  std::vector<std::size_t> included;
  std::vector<std::size_t> trimmed_out;
  std::vector<double> weights_used;  // aligned with the input order
  Strategy strategy = Strategy::TrimmedWeightedMean;
  double theta = 0.0;
  std::size_t trim_per_side = 0;
  bool trim_skipped = false;
  bool zero_weight_fallback = false;
  std::string policy_version;
};

// Sorts by (score, weight, submitter_id), trims k per side, then computes
// sum(w*s)/sum(w) over the survivors in that fixed order. All-zero surviving
// weight falls back to the unweighted mean and flags the outcome.
ConsensusOutcome trimmed_weighted_mean(std::span<const Submission> subs, double theta,
                                       TrimRule rule = TrimRule::Floor,
                                       MidpointTie tie = MidpointTie::TowardLower,
                                       std::string policy_version = "consensus-v1");

// Plurality vote with equal weights; ties resolve to the lower-score label.
ConsensusOutcome simple_majority(std::span<const Submission> subs,
                                 std::string policy_version = "consensus-v1");

// Keeps the classification of the minimum order_index submission. Duplicate
// order indices are rejected.
ConsensusOutcome first_wins(std::span<const Submission> subs,
                            std::string policy_version = "consensus-v1");

// Dispatch on config.strategy.
ConsensusOutcome run_strategy(std::span<const Submission> subs, const ConsensusConfig& config);

struct TimedSubmission {
  Submission submission;
  VirtualTime arrival = 0;
};

// Single-round agreement with a virtual-time deadline. Single-writer: one
// owner appends arrivals and closes; a closed round is freely readable.
class AgreementRound {
 public:
  enum class State { Open, Closed };

  AgreementRound(std::string target_id, VirtualTime start, ConsensusConfig config);

  void receive(Submission submission, VirtualTime arrival);

  // Applies the strategy to on-time arrivals, sorted by (arrival,
  // submitter_id) so duplicate timestamps stay deterministic. Returns nullopt
  // (void round) when nothing arrived on time. Appends one audit record per
  // computed outcome.
  std::optional<ConsensusOutcome> close(AuditLog& log);

  State state() const { return state_; }
  const std::string& target_id() const { return target_id_; }
  VirtualTime deadline() const { return deadline_; }
  std::size_t on_time_count() const;
  const std::vector<TimedSubmission>& arrivals() const { return arrivals_; }

 private:
  std::string target_id_;
  VirtualTime start_;
  VirtualTime deadline_;
  ConsensusConfig config_;
  std::vector<TimedSubmission> arrivals_;
  State state_ = State::Open;
};

// Convenience wrapper: one round over a batch of timed arrivals.
std::optional<ConsensusOutcome> run_round(const std::string& target_id,
                                          std::span<const TimedSubmission> arrivals,
                                          const ConsensusConfig& config, AuditLog& log,
                                          VirtualTime round_start = 0);

// JSON audit form of an outcome: all inputs, weights, trim decisions, theta,
// strategy and policy version.
std::string outcome_to_json(const ConsensusOutcome& outcome, std::span<const Submission> subs);

}  // namespace afdo
