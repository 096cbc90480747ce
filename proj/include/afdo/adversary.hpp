#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "afdo/consensus.hpp"
#include "afdo/core_model.hpp"

namespace afdo {

// ---------------------------------------------------------------------------
// Attack models
// ---------------------------------------------------------------------------

enum class AttackModel { Sybil, Collusion, Poisoning };

inline constexpr AttackModel kAllAttackModels[] = {
    AttackModel::Sybil, AttackModel::Collusion, AttackModel::Poisoning};

std::string to_string(AttackModel model);
AttackModel attack_model_from_string(const std::string& text);

inline constexpr double kSweepFractions[] = {0.0, 0.10, 0.15, 0.20, 0.25, 0.33, 0.50};

// Class at maximal ordinal distance from c_star; the VUS tie resolves to
// Benign. Worst case for a mean-based aggregator.
Classification adversarial_alternative(Classification c_star);

// Number of adversarial submissions for a record of n honest ones.
std::size_t attack_count(std::size_t n, double fraction);

// Appends f submissions with R ~ U(0.20, 0.40), conf ~ U(0.40, 0.70) and the
// adversarial class; honest submissions untouched.
ConflictRecord apply_sybil(const ConflictRecord& record, std::size_t f, std::uint64_t seed);

// Reclassifies the f highest-reputation submissions, reputation ties broken
// by submitter_id; reputations and confidences unchanged.
ConflictRecord apply_collusion(const ConflictRecord& record, std::size_t f);

// Samples f submissions uniformly without replacement from the full honest
// set, raises each sampled confidence to the round maximum and flips the
// class.
ConflictRecord apply_poisoning(const ConflictRecord& record, std::size_t f,
                               std::uint64_t seed);

ConflictRecord apply_attack(const ConflictRecord& record, AttackModel model,
                            double fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Bootstrap
// ---------------------------------------------------------------------------

struct BootstrapCI {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Percentile bootstrap over record-level resampling.
BootstrapCI bootstrap_ci(const std::vector<double>& indicators, std::size_t resamples,
                         double level, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sweeps and ablation
// ---------------------------------------------------------------------------

struct SweepCell {
  AttackModel model = AttackModel::Sybil;
  double fraction = 0.0;
  Strategy strategy = Strategy::TrimmedWeightedMean;
  double theta = 0.20;
  std::size_t n_records = 0;
  std::size_t trials = 0;
  double accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct SweepConfig {
  std::vector<Strategy> strategies = {Strategy::TrimmedWeightedMean};
  std::vector<AttackModel> models = {AttackModel::Sybil, AttackModel::Collusion,
                                     AttackModel::Poisoning};
  std::vector<double> fractions = {0.0, 0.10, 0.15, 0.20, 0.25, 0.33, 0.50};
  std::size_t trials = 10;
  double theta = 0.20;
  std::size_t bootstrap_resamples = 1000;
  double bootstrap_level = 0.95;
  std::uint64_t seed = 42;
};

// One cell per (model, fraction, strategy); sub-seeds derive from
// (seed, model, fraction label, strategy, trial) so any cell reruns
// independently and reproduces exactly.
std::vector<SweepCell> run_sweep(const std::vector<ConflictRecord>& corpus,
                                 const SweepConfig& config);

// Accuracy of one strategy on one unattacked corpus.
double score_corpus(const std::vector<ConflictRecord>& corpus, Strategy strategy,
                    double theta, std::vector<double>* per_record = nullptr);

struct AblationCell {
  Strategy strategy = Strategy::TrimmedWeightedMean;
  // Bucket rows plus an "all" row.
  std::string bucket;
  std::size_t n_records = 0;
  double accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// TWM / SimpleMajority / FirstWins over the corpus, stratified by bucket,
// no attacks.
std::vector<AblationCell> run_ablation(const std::vector<ConflictRecord>& corpus,
                                       double theta, std::uint64_t seed);

struct ThetaCell {
  double theta = 0.0;
  std::size_t n_records = 0;
  double accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline constexpr double kThetaGrid[] = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.40};

// No-attack TWM accuracy across the theta grid.
std::vector<ThetaCell> run_theta_sensitivity(const std::vector<ConflictRecord>& corpus,
                                             const std::vector<double>& thetas,
                                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// CSV emission (schema: model,fraction,strategy,theta,bucket,n_records,
// accuracy,ci_low,ci_high)
// ---------------------------------------------------------------------------

std::string sweep_to_csv(const std::vector<SweepCell>& cells);
std::string ablation_to_csv(const std::vector<AblationCell>& cells, double theta);
std::string theta_to_csv(const std::vector<ThetaCell>& cells);

}  // namespace afdo
