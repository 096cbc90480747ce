#include "afdo/consensus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

namespace afdo {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::TrimmedWeightedMean: return "twm";
    case Strategy::SimpleMajority: return "majority";
    case Strategy::FirstWins: return "first_wins";
  }
  throw std::invalid_argument("unknown strategy value");
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "twm") return Strategy::TrimmedWeightedMean;
  if (s == "majority") return Strategy::SimpleMajority;
  if (s == "first_wins") return Strategy::FirstWins;
  throw std::invalid_argument("unknown strategy: " + std::string(s));
}

std::size_t trim_count(std::size_t n, double theta, TrimRule rule) {
  if (n < 1) {
    throw std::invalid_argument("trim_count: n must be >= 1");
  }
  if (!(theta > 0.0 && theta < 0.5)) {
    throw std::invalid_argument("trim_count: theta must lie in (0, 0.5)");
  }
  const double scaled = theta * static_cast<double>(n);
  const std::size_t raw = rule == TrimRule::Floor
                              ? static_cast<std::size_t>(std::floor(scaled))
                              : static_cast<std::size_t>(std::ceil(scaled));
  return std::max<std::size_t>(1, raw);
}

bool detect_conflict(const Interpretation& a, const Interpretation& b) {
  return a.target_id == b.target_id && a.classification != b.classification;
}

namespace {

void require_valid(std::span<const Submission> subs) {
  if (subs.empty()) {
    throw std::invalid_argument("consensus over empty submission set");
  }
  for (const Submission& s : subs) {
    validate_submission(s);
  }
}

std::vector<double> weights_of(std::span<const Submission> subs) {
  std::vector<double> weights;
  weights.reserve(subs.size());
  for (const Submission& s : subs) {
    weights.push_back(s.weight());
  }
  return weights;
}

// Double-double accumulation. Plain doubles drift a few ulp from the exact
// quotient at n = 12; error-free transforms keep it within 1 ulp.
struct TwoFold {
  double hi = 0.0;
  double lo = 0.0;
};

TwoFold two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

TwoFold two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

TwoFold renorm(double hi, double lo) {
  const double s = hi + lo;
  return {s, lo - (s - hi)};
}

TwoFold dd_add(TwoFold a, TwoFold b) {
  const TwoFold s = two_sum(a.hi, b.hi);
  return renorm(s.hi, s.lo + a.lo + b.lo);
}

TwoFold dd_mul(TwoFold a, double b) {
  const TwoFold p = two_prod(a.hi, b);
  return renorm(p.hi, p.lo + a.lo * b);
}

double dd_div(TwoFold num, TwoFold den) {
  const double q0 = num.hi / den.hi;
  const TwoFold back = dd_mul(den, q0);
  const TwoFold residue = dd_add(num, {-back.hi, -back.lo});
  return q0 + (residue.hi + residue.lo) / (den.hi + den.lo);
}

}  // namespace

ConsensusOutcome trimmed_weighted_mean(std::span<const Submission> subs, double theta,
                                       TrimRule rule, MidpointTie tie,
                                       std::string policy_version) {
  require_valid(subs);
  const std::size_t n = subs.size();

  ConsensusOutcome outcome;
  outcome.strategy = Strategy::TrimmedWeightedMean;
  outcome.theta = theta;
  outcome.weights_used = weights_of(subs);
  outcome.policy_version = std::move(policy_version);

  // Deterministic total order: by score, then weight, then submitter id.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = subs[a].score();
    const double sb = subs[b].score();
    if (sa != sb) return sa < sb;
    if (subs[a].weight() != subs[b].weight()) return subs[a].weight() < subs[b].weight();
    return subs[a].submitter_id < subs[b].submitter_id;
  });

  std::size_t k = trim_count(n, theta, rule);
  if (2 * k >= n) {
    // Trim would leave nothing; keep everyone rather than fail the round.
    k = 0;
    outcome.trim_skipped = true;
  }
  outcome.trim_per_side = k;

  for (std::size_t i = 0; i < n; ++i) {
    if (i < k || i >= n - k) {
      outcome.trimmed_out.push_back(order[i]);
    } else {
      outcome.included.push_back(order[i]);
    }
  }

  // Left-to-right accumulation in sorted survivor order, for bit
  // reproducibility across runs. Weights enter as exact reputation x
  // confidence products.
  TwoFold weighted_sum;
  TwoFold weight_total;
  for (const std::size_t idx : outcome.included) {
    const TwoFold w = two_prod(subs[idx].reputation, subs[idx].confidence);
    weighted_sum = dd_add(weighted_sum, dd_mul(w, subs[idx].score()));
    weight_total = dd_add(weight_total, w);
  }
  if (weight_total.hi > 0.0) {
    outcome.consensus_score = dd_div(weighted_sum, weight_total);
  } else {
    double score_sum = 0.0;
    for (const std::size_t idx : outcome.included) {
      score_sum += subs[idx].score();
    }
    outcome.consensus_score = score_sum / static_cast<double>(outcome.included.size());
    outcome.zero_weight_fallback = true;
  }
  outcome.consensus_class = score_to_classification(outcome.consensus_score, tie);
  return outcome;
}

ConsensusOutcome simple_majority(std::span<const Submission> subs,
                                 std::string policy_version) {
  require_valid(subs);

  ConsensusOutcome outcome;
  outcome.strategy = Strategy::SimpleMajority;
  outcome.weights_used.assign(subs.size(), 1.0);
  outcome.policy_version = std::move(policy_version);
  outcome.included.resize(subs.size());
  std::iota(outcome.included.begin(), outcome.included.end(), 0);

  std::map<Classification, std::size_t> votes;
  for (const Submission& s : subs) {
    ++votes[s.classification];
  }
  // Map order is ascending score, so on a tied count the lower label wins.
  Classification best = Classification::Benign;
  std::size_t best_votes = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_votes) {
      best = label;
      best_votes = count;
    }
  }
  outcome.consensus_class = best;
  outcome.consensus_score = classification_to_score(best);
  return outcome;
}

ConsensusOutcome first_wins(std::span<const Submission> subs, std::string policy_version) {
  require_valid(subs);

  std::set<std::int64_t> seen;
  for (const Submission& s : subs) {
    if (!seen.insert(s.order_index).second) {
      throw std::invalid_argument("duplicate order_index in first_wins input");
    }
  }

  std::size_t first = 0;
  for (std::size_t i = 1; i < subs.size(); ++i) {
    if (subs[i].order_index < subs[first].order_index) {
      first = i;
    }
  }

  ConsensusOutcome outcome;
  outcome.strategy = Strategy::FirstWins;
  outcome.weights_used = weights_of(subs);
  outcome.policy_version = std::move(policy_version);
  outcome.included.push_back(first);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (i != first) {
      outcome.trimmed_out.push_back(i);
    }
  }
  outcome.consensus_class = subs[first].classification;
  outcome.consensus_score = subs[first].score();
  return outcome;
}

ConsensusOutcome run_strategy(std::span<const Submission> subs,
                              const ConsensusConfig& config) {
  switch (config.strategy) {
    case Strategy::TrimmedWeightedMean:
      return trimmed_weighted_mean(subs, config.theta, config.trim_rule,
                                   config.midpoint_tie, config.policy_version);
    case Strategy::SimpleMajority:
      return simple_majority(subs, config.policy_version);
    case Strategy::FirstWins:
      return first_wins(subs, config.policy_version);
  }
  throw std::invalid_argument("unknown strategy value");
}

AgreementRound::AgreementRound(std::string target_id, VirtualTime start,
                               ConsensusConfig config)
    : target_id_(std::move(target_id)),
      start_(start),
      deadline_(start + config.round_timeout.count()),
      config_(std::move(config)) {}

void AgreementRound::receive(Submission submission, VirtualTime arrival) {
  if (state_ != State::Open) {
    throw std::logic_error("receive on a closed round");
  }
  arrivals_.push_back(TimedSubmission{std::move(submission), arrival});
}

std::size_t AgreementRound::on_time_count() const {
  std::size_t count = 0;
  for (const TimedSubmission& t : arrivals_) {
    if (t.arrival <= deadline_) {
      ++count;
    }
  }
  return count;
}

std::optional<ConsensusOutcome> AgreementRound::close(AuditLog& log) {
  if (state_ != State::Open) {
    throw std::logic_error("round already closed");
  }
  state_ = State::Closed;

  std::vector<TimedSubmission> on_time;
  for (const TimedSubmission& t : arrivals_) {
    if (t.arrival <= deadline_) {
      on_time.push_back(t);
    }
  }
  if (on_time.empty()) {
    return std::nullopt;
  }
  std::sort(on_time.begin(), on_time.end(),
            [](const TimedSubmission& a, const TimedSubmission& b) {
              if (a.arrival != b.arrival) return a.arrival < b.arrival;
              return a.submission.submitter_id < b.submission.submitter_id;
            });
  std::vector<Submission> subs;
  subs.reserve(on_time.size());
  for (const TimedSubmission& t : on_time) {
    subs.push_back(t.submission);
    // order_index is the arrival rank; the round is its authority, not the
    // caller.
    subs.back().order_index = static_cast<std::int64_t>(subs.size()) - 1;
  }

  ConsensusOutcome outcome = run_strategy(subs, config_);

  AuditRecord record;
  record.activity = "consensus_round";
  for (const Submission& s : subs) {
    record.inputs.push_back(s.submitter_id);
  }
  record.outputs.push_back(outcome_to_json(outcome, subs));
  record.agent = target_id_;
  record.policy_version = outcome.policy_version;
  record.timestamp = deadline_;
  log.append(record);

  return outcome;
}

std::optional<ConsensusOutcome> run_round(const std::string& target_id,
                                          std::span<const TimedSubmission> arrivals,
                                          const ConsensusConfig& config, AuditLog& log,
                                          VirtualTime round_start) {
  AgreementRound round(target_id, round_start, config);
  for (const TimedSubmission& t : arrivals) {
    round.receive(t.submission, t.arrival);
  }
  return round.close(log);
}

std::string outcome_to_json(const ConsensusOutcome& outcome,
                            std::span<const Submission> subs) {
  nlohmann::ordered_json j;
  j["strategy"] = to_string(outcome.strategy);
  j["theta"] = outcome.theta;
  j["trim_per_side"] = outcome.trim_per_side;
  j["trim_skipped"] = outcome.trim_skipped;
  j["zero_weight_fallback"] = outcome.zero_weight_fallback;
  j["policy_version"] = outcome.policy_version;
  j["consensus_score"] = outcome.consensus_score;
  j["consensus_class"] = to_string(outcome.consensus_class);
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < subs.size(); ++i) {
    nlohmann::ordered_json entry;
    entry["submitter"] = subs[i].submitter_id;
    entry["score"] = subs[i].score();
    entry["weight"] = i < outcome.weights_used.size() ? outcome.weights_used[i]
                                                      : subs[i].weight();
    inputs.push_back(entry);
  }
  j["inputs"] = inputs;
  j["included"] = outcome.included;
  j["trimmed_out"] = outcome.trimmed_out;
  return j.dump();
}

}  // namespace afdo
