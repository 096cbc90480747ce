#include "afdo/trust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "afdo/rng.hpp"

namespace afdo {

std::string to_string(TrustEventKind k) {
  switch (k) {
    case TrustEventKind::ValidationConfirmed: return "validation_confirmed";
    case TrustEventKind::ValidationRefuted: return "validation_refuted";
    case TrustEventKind::ValidationUncertain: return "validation_uncertain";
    case TrustEventKind::SimilarPatternFound: return "similar_pattern_found";
    case TrustEventKind::TimeDecay: return "time_decay";
    case TrustEventKind::InstitutionalClosure: return "institutional_closure";
  }
  throw std::invalid_argument("unknown trust event kind");
}

double trust_step(double score, const TrustEvent& event, const TrustParameters& params) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("trust score outside [0,1]");
  }
  double next = score;
  switch (event.kind) {
    case TrustEventKind::ValidationConfirmed:
      next = std::min(1.0, score + params.alpha);
      break;
    case TrustEventKind::ValidationRefuted:
      next = score - params.rho;
      break;
    case TrustEventKind::ValidationUncertain:
      next = score - params.beta;
      break;
    case TrustEventKind::SimilarPatternFound:
      next = std::min(1.0, score + params.delta);
      break;
    case TrustEventKind::TimeDecay:
      if (event.delta_years < 0.0) {
        throw std::invalid_argument("time decay over negative interval");
      }
      next = score - params.beta * event.delta_years;
      break;
    case TrustEventKind::InstitutionalClosure:
      next = score * (1.0 - params.gamma);
      break;
  }
  return std::clamp(next, 0.0, 1.0);
}

TrustState apply_trust_event(TrustState state, const TrustEvent& event,
                             const TrustParameters& params, AuditLog& log,
                             VirtualTime now) {
  const double pre = state.score;
  const double post = trust_step(pre, event, params);

  AuditRecord record;
  record.activity = "trust_update";
  record.inputs = {to_string(event.kind), "pre=" + std::to_string(pre)};
  record.outputs = {"post=" + std::to_string(post)};
  record.agent = event.source;
  record.policy_version = "trust-v1";
  record.timestamp = now;
  const std::size_t audit_id = log.append(record);

  state.score = post;
  state.last_update = now;
  state.history.push_back(TrustHistoryEntry{event, pre, post, audit_id});
  return state;
}

std::vector<double> simulate_trust_trajectory(double initial,
                                              std::span<const TrustEvent> schedule,
                                              const TrustParameters& params,
                                              AuditLog* log) {
  std::vector<double> trajectory;
  trajectory.reserve(schedule.size() + 1);
  trajectory.push_back(initial);
  if (log == nullptr) {
    double score = initial;
    for (const TrustEvent& event : schedule) {
      score = trust_step(score, event, params);
      trajectory.push_back(score);
    }
    return trajectory;
  }
  TrustState state;
  state.score = initial;
  VirtualTime now = 0;
  for (const TrustEvent& event : schedule) {
    state = apply_trust_event(std::move(state), event, params, *log, now);
    trajectory.push_back(state.score);
    now += 1;
  }
  return trajectory;
}

void validate_mix(const TrustEventMix& mix) {
  const double values[] = {mix.confirmed, mix.refuted, mix.uncertain, mix.similar};
  double total = 0.0;
  for (const double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("mix probability outside [0,1]");
    }
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("mix probabilities must sum to 1");
  }
}

namespace {

TrustEventKind draw_event(Rng& rng, const TrustEventMix& mix) {
  const double u = rng.uniform();
  if (u < mix.confirmed) return TrustEventKind::ValidationConfirmed;
  if (u < mix.confirmed + mix.refuted) return TrustEventKind::ValidationRefuted;
  if (u < mix.confirmed + mix.refuted + mix.uncertain) {
    return TrustEventKind::ValidationUncertain;
  }
  return TrustEventKind::SimilarPatternFound;
}

double median_of(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median of empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) {
    return values[n / 2];
  }
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

RecoveryResult recovery_time(double initial_score, const TrustEventMix& mix,
                             const TrustParameters& params, std::uint64_t seed,
                             std::size_t cap) {
  validate_mix(mix);
  if (!(initial_score >= 0.0 && initial_score <= 1.0)) {
    throw std::invalid_argument("initial score outside [0,1]");
  }

  const double target = initial_score;
  double score = trust_step(initial_score,
                            TrustEvent{TrustEventKind::InstitutionalClosure}, params);

  Rng rng(seed);
  RecoveryResult result;
  while (score < target && result.events < cap) {
    const TrustEvent event{draw_event(rng, mix)};
    score = trust_step(score, event, params);
    ++result.events;
  }
  result.censored = score < target;
  result.final_score = score;
  return result;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("KS distance of empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double sup = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    // Advance past ties together so the CDF step at a shared value is
    // evaluated once, after both jumps.
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    sup = std::max(sup, std::fabs(fa - fb));
  }
  return sup;
}

std::vector<TrustSweepCell> sensitivity_sweep(const TrustSweepConfig& config) {
  validate_mix(config.mix);
  if (config.replicates == 0) {
    throw std::invalid_argument("sweep needs at least one replicate");
  }

  // Replicate seeds shared across every cell: common random numbers.
  std::vector<std::uint64_t> replicate_seeds;
  replicate_seeds.reserve(config.replicates);
  for (std::size_t r = 0; r < config.replicates; ++r) {
    replicate_seeds.push_back(
        derive_seed(config.seed, "trust-replicate-" + std::to_string(r)));
  }

  const TrustParameters defaults;
  std::vector<double> default_finals;
  {
    TrustParameters params = config.base;
    params.alpha = defaults.alpha;
    params.beta = defaults.beta;
    params.gamma = defaults.gamma;
    for (const std::uint64_t s : replicate_seeds) {
      default_finals.push_back(
          recovery_time(config.initial_score, config.mix, params, s, config.cap)
              .final_score);
    }
  }

  std::vector<TrustSweepCell> cells;
  for (const double alpha : config.alphas) {
    for (const double beta : config.betas) {
      for (const double gamma : config.gammas) {
        TrustParameters params = config.base;
        params.alpha = alpha;
        params.beta = beta;
        params.gamma = gamma;

        std::vector<double> recoveries;
        std::vector<double> finals;
        std::size_t censored = 0;
        for (const std::uint64_t s : replicate_seeds) {
          const RecoveryResult r =
              recovery_time(config.initial_score, config.mix, params, s, config.cap);
          recoveries.push_back(static_cast<double>(r.events));
          finals.push_back(r.final_score);
          if (r.censored) {
            ++censored;
          }
        }

        TrustSweepCell cell;
        cell.alpha = alpha;
        cell.beta = beta;
        cell.gamma = gamma;
        cell.median_recovery = median_of(recoveries);
        cell.censored_fraction =
            static_cast<double>(censored) / static_cast<double>(config.replicates);
        cell.ks_vs_default = ks_distance(finals, default_finals);
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

void TrustRegister::ensure(const std::string& pid, double initial_score) {
  if (states_.find(pid) != states_.end()) {
    return;
  }
  TrustState state;
  state.score = initial_score;
  states_.emplace(pid, std::move(state));
}

const TrustState& TrustRegister::state(const std::string& pid) const {
  const auto it = states_.find(pid);
  if (it == states_.end()) {
    throw std::out_of_range("no trust state for pid: " + pid);
  }
  return it->second;
}

double TrustRegister::apply(const std::string& pid, const TrustEvent& event,
                            const TrustParameters& params, VirtualTime now) {
  auto it = states_.find(pid);
  if (it == states_.end()) {
    throw std::out_of_range("no trust state for pid: " + pid);
  }
  it->second = apply_trust_event(std::move(it->second), event, params, *log_, now);
  return it->second.score;
}

}  // namespace afdo
