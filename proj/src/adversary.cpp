#include "afdo/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string_view>

#include "afdo/corpus.hpp"
#include "afdo/hash.hpp"
#include "afdo/rng.hpp"

namespace afdo {

std::string to_string(AttackModel model) {
  switch (model) {
    case AttackModel::Sybil: return "sybil";
    case AttackModel::Collusion: return "collusion";
    case AttackModel::Poisoning: return "poisoning";
  }
  throw std::invalid_argument("unknown attack model value");
}

AttackModel attack_model_from_string(const std::string& text) {
  if (text == "sybil") return AttackModel::Sybil;
  if (text == "collusion") return AttackModel::Collusion;
  if (text == "poisoning") return AttackModel::Poisoning;
  throw std::invalid_argument("unknown attack model: " + text);
}

Classification adversarial_alternative(Classification c_star) {
  // Ordinal distance from Benign=0 .. Pathogenic=4; the VUS tie lands on
  // Benign.
  return static_cast<int>(c_star) <= 1 ? Classification::Pathogenic
                                       : Classification::Benign;
}

std::size_t attack_count(std::size_t n, double fraction) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::invalid_argument("attack fraction must lie in [0, 1]");
  }
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

ConflictRecord apply_sybil(const ConflictRecord& record, std::size_t f,
                           std::uint64_t seed) {
  ConflictRecord attacked = record;
  if (f == 0) {
    return attacked;
  }
  Rng rng(seed);
  const Classification target =
      adversarial_alternative(record.ground_truth.classification);
  std::int64_t order = 0;
  for (const Submission& s : record.submissions) {
    order = std::max(order, s.order_index);
  }
  for (std::size_t i = 0; i < f; ++i) {
    Submission sybil;
    sybil.submitter_id =
        hash_submitter("Sybil-" + record.target_id + "-" + std::to_string(i));
    sybil.category = SubmitterCategory::Individual;
    sybil.classification = target;
    sybil.reputation = rng.uniform_range(0.20, 0.40);
    sybil.confidence = rng.uniform_range(0.40, 0.70);
    sybil.order_index = ++order;
    sybil.review_status = std::string(kStatusNoCriteria);
    attacked.submissions.push_back(std::move(sybil));
  }
  return attacked;
}

ConflictRecord apply_collusion(const ConflictRecord& record, std::size_t f) {
  ConflictRecord attacked = record;
  f = std::min(f, attacked.submissions.size());
  if (f == 0) {
    return attacked;
  }
  std::vector<std::size_t> order(attacked.submissions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Submission& sa = attacked.submissions[a];
    const Submission& sb = attacked.submissions[b];
    if (sa.reputation != sb.reputation) return sa.reputation > sb.reputation;
    return sa.submitter_id < sb.submitter_id;
  });
  const Classification target =
      adversarial_alternative(record.ground_truth.classification);
  for (std::size_t i = 0; i < f; ++i) {
    attacked.submissions[order[i]].classification = target;
  }
  return attacked;
}

ConflictRecord apply_poisoning(const ConflictRecord& record, std::size_t f,
                               std::uint64_t seed) {
  ConflictRecord attacked = record;
  const std::size_t n = attacked.submissions.size();
  f = std::min(f, n);
  if (f == 0) {
    return attacked;
  }
  double max_confidence = 0.0;
  for (const Submission& s : record.submissions) {
    max_confidence = std::max(max_confidence, s.confidence);
  }
  Rng rng(seed);
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  // Partial Fisher-Yates gives a uniform sample without replacement.
  for (std::size_t i = 0; i < f; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
    std::swap(indices[i], indices[j]);
  }
  const Classification target =
      adversarial_alternative(record.ground_truth.classification);
  for (std::size_t i = 0; i < f; ++i) {
    Submission& s = attacked.submissions[indices[i]];
    s.classification = target;
    s.confidence = max_confidence;
  }
  return attacked;
}

ConflictRecord apply_attack(const ConflictRecord& record, AttackModel model,
                            double fraction, std::uint64_t seed) {
  const std::size_t f = attack_count(record.submissions.size(), fraction);
  switch (model) {
    case AttackModel::Sybil: return apply_sybil(record, f, seed);
    case AttackModel::Collusion: return apply_collusion(record, f);
    case AttackModel::Poisoning: return apply_poisoning(record, f, seed);
  }
  throw std::invalid_argument("unknown attack model value");
}

// ---------------------------------------------------------------------------
// Bootstrap
// ---------------------------------------------------------------------------

namespace {

// Linear interpolation between order statistics, so the quantile is a pinned
// function of the sorted resample means.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) {
    return sorted.back();
  }
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double mean_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace

BootstrapCI bootstrap_ci(const std::vector<double>& indicators, std::size_t resamples,
                         double level, std::uint64_t seed) {
  if (indicators.empty()) {
    throw std::invalid_argument("bootstrap needs at least one indicator");
  }
  if (resamples == 0) {
    throw std::invalid_argument("bootstrap needs at least one resample");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("bootstrap level must lie in (0, 1)");
  }
  BootstrapCI ci;
  ci.mean = mean_of(indicators);
  Rng rng(seed);
  const std::size_t n = indicators.size();
  std::vector<double> means;
  means.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += indicators[static_cast<std::size_t>(rng.uniform_int(n))];
    }
    means.push_back(total / static_cast<double>(n));
  }
  std::sort(means.begin(), means.end());
  const double alpha = 1.0 - level;
  ci.lower = quantile_sorted(means, alpha / 2.0);
  ci.upper = quantile_sorted(means, 1.0 - alpha / 2.0);
  return ci;
}

// ---------------------------------------------------------------------------
// Sweeps and ablation
// ---------------------------------------------------------------------------

namespace {

std::string fixed2(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

std::string fixed6(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

double score_record(const ConflictRecord& record, Strategy strategy, double theta) {
  ConsensusConfig config;
  config.strategy = strategy;
  config.theta = theta;
  const ConsensusOutcome outcome = run_strategy(record.submissions, config);
  return outcome.consensus_class == record.ground_truth.classification ? 1.0 : 0.0;
}

}  // namespace

double score_corpus(const std::vector<ConflictRecord>& corpus, Strategy strategy,
                    double theta, std::vector<double>* per_record) {
  if (corpus.empty()) {
    throw std::invalid_argument("cannot score an empty corpus");
  }
  double total = 0.0;
  for (const ConflictRecord& record : corpus) {
    const double indicator = score_record(record, strategy, theta);
    total += indicator;
    if (per_record != nullptr) {
      per_record->push_back(indicator);
    }
  }
  return total / static_cast<double>(corpus.size());
}

std::vector<SweepCell> run_sweep(const std::vector<ConflictRecord>& corpus,
                                 const SweepConfig& config) {
  if (corpus.empty()) {
    throw std::invalid_argument("cannot sweep an empty corpus");
  }
  if (config.trials == 0) {
    throw std::invalid_argument("sweep needs at least one trial");
  }
  std::vector<SweepCell> cells;
  for (const AttackModel model : config.models) {
    for (const double fraction : config.fractions) {
      // Attack randomness is keyed by (model, fraction, trial, record) only,
      // so every strategy faces the identical attacked corpus.
      std::vector<std::vector<ConflictRecord>> attacked_trials;
      attacked_trials.reserve(config.trials);
      for (std::size_t trial = 0; trial < config.trials; ++trial) {
        std::vector<ConflictRecord> attacked;
        attacked.reserve(corpus.size());
        for (const ConflictRecord& record : corpus) {
          const std::uint64_t attack_seed = derive_seed(
              config.seed, "attack-" + to_string(model) + "-f" + fixed2(fraction) +
                               "-trial-" + std::to_string(trial) + "-" +
                               record.target_id);
          attacked.push_back(apply_attack(record, model, fraction, attack_seed));
        }
        attacked_trials.push_back(std::move(attacked));
      }
      for (const Strategy strategy : config.strategies) {
        SweepCell cell;
        cell.model = model;
        cell.fraction = fraction;
        cell.strategy = strategy;
        cell.theta = config.theta;
        cell.n_records = corpus.size();
        cell.trials = config.trials;
        std::vector<double> indicators;
        indicators.reserve(corpus.size() * config.trials);
        for (const std::vector<ConflictRecord>& attacked : attacked_trials) {
          score_corpus(attacked, strategy, config.theta, &indicators);
        }
        const BootstrapCI ci = bootstrap_ci(
            indicators, config.bootstrap_resamples, config.bootstrap_level,
            derive_seed(config.seed, "bootstrap-" + to_string(model) + "-f" +
                                         fixed2(fraction) + "-" + to_string(strategy)));
        cell.accuracy = ci.mean;
        cell.ci_low = ci.lower;
        cell.ci_high = ci.upper;
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::vector<AblationCell> run_ablation(const std::vector<ConflictRecord>& corpus,
                                       double theta, std::uint64_t seed) {
  if (corpus.empty()) {
    throw std::invalid_argument("cannot ablate an empty corpus");
  }
  constexpr Strategy kStrategies[] = {Strategy::TrimmedWeightedMean,
                                      Strategy::SimpleMajority, Strategy::FirstWins};
  std::vector<AblationCell> cells;
  for (const Strategy strategy : kStrategies) {
    for (std::size_t b = 0; b <= kAllBuckets.size(); ++b) {
      AblationCell cell;
      cell.strategy = strategy;
      std::vector<ConflictRecord> subset;
      if (b < kAllBuckets.size()) {
        cell.bucket = to_string(kAllBuckets[b]);
        for (const ConflictRecord& record : corpus) {
          if (record.bucket == kAllBuckets[b]) {
            subset.push_back(record);
          }
        }
      } else {
        cell.bucket = "all";
        subset = corpus;
      }
      cell.n_records = subset.size();
      if (!subset.empty()) {
        std::vector<double> indicators;
        cell.accuracy = score_corpus(subset, strategy, theta, &indicators);
        const BootstrapCI ci = bootstrap_ci(
            indicators, 1000, 0.95,
            derive_seed(seed, "ablation-" + to_string(strategy) + "-" + cell.bucket));
        cell.ci_low = ci.lower;
        cell.ci_high = ci.upper;
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<ThetaCell> run_theta_sensitivity(const std::vector<ConflictRecord>& corpus,
                                             const std::vector<double>& thetas,
                                             std::uint64_t seed) {
  if (corpus.empty()) {
    throw std::invalid_argument("cannot run sensitivity on an empty corpus");
  }
  std::vector<ThetaCell> cells;
  for (const double theta : thetas) {
    ThetaCell cell;
    cell.theta = theta;
    cell.n_records = corpus.size();
    std::vector<double> indicators;
    cell.accuracy =
        score_corpus(corpus, Strategy::TrimmedWeightedMean, theta, &indicators);
    const BootstrapCI ci = bootstrap_ci(indicators, 1000, 0.95,
                                        derive_seed(seed, "theta-" + fixed2(theta)));
    cell.ci_low = ci.lower;
    cell.ci_high = ci.upper;
    cells.push_back(cell);
  }
  return cells;
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kCsvHeader =
    "model,fraction,strategy,theta,bucket,n_records,accuracy,ci_low,ci_high\n";

}  // namespace

std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
  std::string out{kCsvHeader};
  for (const SweepCell& cell : cells) {
    out += to_string(cell.model) + "," + fixed2(cell.fraction) + "," +
           to_string(cell.strategy) + "," + fixed2(cell.theta) + ",all," +
           std::to_string(cell.n_records) + "," + fixed6(cell.accuracy) + "," +
           fixed6(cell.ci_low) + "," + fixed6(cell.ci_high) + "\n";
  }
  return out;
}

std::string ablation_to_csv(const std::vector<AblationCell>& cells, double theta) {
  std::string out{kCsvHeader};
  for (const AblationCell& cell : cells) {
    out += "none,0.00," + to_string(cell.strategy) + "," + fixed2(theta) + "," +
           cell.bucket + "," + std::to_string(cell.n_records) + "," +
           fixed6(cell.accuracy) + "," + fixed6(cell.ci_low) + "," +
           fixed6(cell.ci_high) + "\n";
  }
  return out;
}

std::string theta_to_csv(const std::vector<ThetaCell>& cells) {
  std::string out{kCsvHeader};
  for (const ThetaCell& cell : cells) {
    out += "none,0.00,twm," + fixed2(cell.theta) + ",all," +
           std::to_string(cell.n_records) + "," + fixed6(cell.accuracy) + "," +
           fixed6(cell.ci_low) + "," + fixed6(cell.ci_high) + "\n";
  }
  return out;
}

}  // namespace afdo
