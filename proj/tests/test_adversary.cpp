#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "afdo/adversary.hpp"
#include "afdo/corpus.hpp"

using afdo::AttackModel;
using afdo::Classification;
using afdo::ConflictRecord;
using afdo::Submission;

namespace {

Submission sub(std::string id, Classification c, double reputation, double confidence,
               std::int64_t order) {
  Submission s;
  s.submitter_id = std::move(id);
  s.category = afdo::SubmitterCategory::ClinicalLab;
  s.classification = c;
  s.reputation = reputation;
  s.confidence = confidence;
  s.order_index = order;
  s.review_status = std::string(afdo::kStatusConflicting);
  return s;
}

ConflictRecord fixture_record() {
  ConflictRecord r;
  r.target_id = "SYN0000001";
  r.ground_truth = sub("ep-hash", Classification::Pathogenic, 0.9, 0.9, 0);
  r.ground_truth.category = afdo::SubmitterCategory::ExpertPanel;
  r.ground_truth.review_status = std::string(afdo::kStatusExpertPanel);
  r.submissions = {
      sub("aa", Classification::Pathogenic, 0.85, 0.85, 0),
      sub("bb", Classification::LikelyPathogenic, 0.70, 0.55, 1),
      sub("cc", Classification::VUS, 0.55, 0.40, 2),
      sub("dd", Classification::LikelyPathogenic, 0.70, 0.70, 3),
  };
  r.bucket = afdo::DisagreementBucket::PlpVsVus;
  return r;
}

}  // namespace

TEST_CASE("attack model names round-trip") {
  for (auto m : afdo::kAllAttackModels) {
    CHECK(afdo::attack_model_from_string(afdo::to_string(m)) == m);
  }
  CHECK(afdo::to_string(AttackModel::Sybil) == "sybil");
  CHECK_THROWS(afdo::attack_model_from_string("ddos"));
}

TEST_CASE("adversarial alternative maximises ordinal distance") {
  CHECK(afdo::adversarial_alternative(Classification::Benign) == Classification::Pathogenic);
  CHECK(afdo::adversarial_alternative(Classification::LikelyBenign) ==
        Classification::Pathogenic);
  // The VUS tie resolves toward Benign.
  CHECK(afdo::adversarial_alternative(Classification::VUS) == Classification::Benign);
  CHECK(afdo::adversarial_alternative(Classification::LikelyPathogenic) ==
        Classification::Benign);
  CHECK(afdo::adversarial_alternative(Classification::Pathogenic) == Classification::Benign);
}

TEST_CASE("attack count rounds half away from zero") {
  CHECK(afdo::attack_count(10, 0.0) == 0);
  CHECK(afdo::attack_count(10, 0.10) == 1);
  CHECK(afdo::attack_count(10, 0.15) == 2);   // 1.5 rounds up
  CHECK(afdo::attack_count(10, 0.33) == 3);
  CHECK(afdo::attack_count(4, 0.33) == 1);    // 1.32 rounds down
  CHECK(afdo::attack_count(5, 0.50) == 3);    // 2.5 rounds up
  CHECK(afdo::attack_count(2, 1.0) == 2);
  CHECK_THROWS_AS(afdo::attack_count(10, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(afdo::attack_count(10, 1.1), std::invalid_argument);
}

TEST_CASE("sybil appends low-weight adversaries and leaves honest rows alone") {
  auto record = fixture_record();
  auto attacked = afdo::apply_sybil(record, 2, 99);
  REQUIRE(attacked.submissions.size() == 6);
  for (std::size_t i = 0; i < record.submissions.size(); ++i) {
    CHECK(attacked.submissions[i].submitter_id == record.submissions[i].submitter_id);
    CHECK(attacked.submissions[i].classification == record.submissions[i].classification);
    CHECK(attacked.submissions[i].reputation == record.submissions[i].reputation);
  }
  // Ground truth Pathogenic: the adversarial class is Benign.
  std::set<std::string> ids;
  for (std::size_t i = 4; i < 6; ++i) {
    const auto& s = attacked.submissions[i];
    CHECK(s.classification == Classification::Benign);
    CHECK(s.category == afdo::SubmitterCategory::Individual);
    CHECK(s.reputation >= 0.20);
    CHECK(s.reputation < 0.40);
    CHECK(s.confidence >= 0.40);
    CHECK(s.confidence < 0.70);
    CHECK(s.review_status == afdo::kStatusNoCriteria);
    // Appended after the honest arrivals.
    CHECK(s.order_index > 3);
    ids.insert(s.submitter_id);
  }
  CHECK(ids.size() == 2);

  // Seed purity and seed sensitivity.
  auto again = afdo::apply_sybil(record, 2, 99);
  CHECK(again.submissions[4].reputation == attacked.submissions[4].reputation);
  auto other = afdo::apply_sybil(record, 2, 100);
  CHECK(other.submissions[4].reputation != attacked.submissions[4].reputation);
}

TEST_CASE("collusion flips the highest-reputation submitters") {
  auto record = fixture_record();
  auto attacked = afdo::apply_collusion(record, 2);
  REQUIRE(attacked.submissions.size() == 4);
  // Reputations: aa 0.85, bb 0.70, dd 0.70, cc 0.55. Top two by (reputation
  // desc, id asc): aa then bb.
  CHECK(attacked.submissions[0].classification == Classification::Benign);  // aa flipped
  CHECK(attacked.submissions[1].classification == Classification::Benign);  // bb flipped
  CHECK(attacked.submissions[3].classification == Classification::LikelyPathogenic);  // dd
  CHECK(attacked.submissions[2].classification == Classification::VUS);  // cc untouched
  // Weights unchanged: the attack subverts standing, not weight.
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(attacked.submissions[i].reputation == record.submissions[i].reputation);
    CHECK(attacked.submissions[i].confidence == record.submissions[i].confidence);
  }
}

TEST_CASE("poisoning flips a sample and raises confidence to the round maximum") {
  auto record = fixture_record();
  auto attacked = afdo::apply_poisoning(record, 2, 7);
  REQUIRE(attacked.submissions.size() == 4);
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (attacked.submissions[i].classification != record.submissions[i].classification) {
      ++flipped;
      CHECK(attacked.submissions[i].classification == Classification::Benign);
      // Round maximum confidence comes from the pre-attack record (0.85).
      CHECK(attacked.submissions[i].confidence == 0.85);
      CHECK(attacked.submissions[i].reputation == record.submissions[i].reputation);
    } else {
      CHECK(attacked.submissions[i].confidence == record.submissions[i].confidence);
    }
  }
  CHECK(flipped == 2);
  auto again = afdo::apply_poisoning(record, 2, 7);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(again.submissions[i].classification == attacked.submissions[i].classification);
  }
}

TEST_CASE("zero attackers is the identity for every model") {
  auto record = fixture_record();
  for (auto model : afdo::kAllAttackModels) {
    auto attacked = afdo::apply_attack(record, model, 0.0, 5);
    REQUIRE(attacked.submissions.size() == record.submissions.size());
    for (std::size_t i = 0; i < record.submissions.size(); ++i) {
      CHECK(attacked.submissions[i].classification == record.submissions[i].classification);
      CHECK(attacked.submissions[i].confidence == record.submissions[i].confidence);
    }
  }
}

TEST_CASE("bootstrap interval brackets the mean and is deterministic") {
  std::vector<double> indicators(80, 1.0);
  for (std::size_t i = 0; i < 20; ++i) {
    indicators[i] = 0.0;
  }
  auto ci = afdo::bootstrap_ci(indicators, 1000, 0.95, 42);
  CHECK(ci.mean == doctest::Approx(0.75));
  CHECK(ci.lower <= ci.mean);
  CHECK(ci.upper >= ci.mean);
  CHECK(ci.lower > 0.5);
  CHECK(ci.upper < 0.95);
  auto again = afdo::bootstrap_ci(indicators, 1000, 0.95, 42);
  CHECK(ci.lower == again.lower);
  CHECK(ci.upper == again.upper);

  // Degenerate all-correct sample: zero-width interval at 1.
  std::vector<double> ones(50, 1.0);
  auto tight = afdo::bootstrap_ci(ones, 200, 0.95, 1);
  CHECK(tight.mean == 1.0);
  CHECK(tight.lower == 1.0);
  CHECK(tight.upper == 1.0);
  CHECK_THROWS_AS(afdo::bootstrap_ci({}, 100, 0.95, 1), std::invalid_argument);
}

TEST_CASE("score_corpus agrees with a direct per-record check") {
  auto spec = afdo::default_corpus_spec(0.05, 42);
  auto corpus = afdo::generate_corpus(spec);
  std::vector<double> per_record;
  double accuracy =
      afdo::score_corpus(corpus, afdo::Strategy::TrimmedWeightedMean, 0.20, &per_record);
  REQUIRE(per_record.size() == corpus.size());
  double manual = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto outcome = afdo::trimmed_weighted_mean(corpus[i].submissions, 0.20);
    const bool correct = outcome.consensus_class == corpus[i].ground_truth.classification;
    CHECK(per_record[i] == (correct ? 1.0 : 0.0));
    manual += correct ? 1.0 : 0.0;
  }
  CHECK(accuracy == doctest::Approx(manual / static_cast<double>(corpus.size())));
  CHECK(accuracy > 0.5);  // weighted consensus beats coin flipping comfortably
}

TEST_CASE("sweep emits one cell per model, fraction and strategy, seeded independently "
          "of strategy") {
  auto spec = afdo::default_corpus_spec(0.05, 42);
  auto corpus = afdo::generate_corpus(spec);
  afdo::SweepConfig config;
  config.models = {AttackModel::Sybil, AttackModel::Collusion};
  config.fractions = {0.0, 0.50};
  config.strategies = {afdo::Strategy::TrimmedWeightedMean, afdo::Strategy::SimpleMajority};
  config.trials = 3;
  config.bootstrap_resamples = 200;
  auto cells = afdo::run_sweep(corpus, config);
  REQUIRE(cells.size() == 2 * 2 * 2);

  for (const auto& cell : cells) {
    CHECK(cell.n_records == corpus.size());
    CHECK(cell.accuracy >= 0.0);
    CHECK(cell.accuracy <= 1.0);
    CHECK(cell.ci_low <= cell.accuracy);
    CHECK(cell.ci_high >= cell.accuracy);
    CHECK(cell.trials == 3);
    if (cell.fraction == 0.0) {
      // No attackers: every model reduces to the baseline for its strategy.
      CHECK(cell.accuracy ==
            doctest::Approx(afdo::score_corpus(corpus, cell.strategy, config.theta)));
    }
  }

  auto again = afdo::run_sweep(corpus, config);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].accuracy == again[i].accuracy);
    CHECK(cells[i].ci_low == again[i].ci_low);
  }
}

TEST_CASE("ablation covers three strategies by bucket plus the all row") {
  auto spec = afdo::default_corpus_spec(0.05, 42);
  auto corpus = afdo::generate_corpus(spec);
  auto cells = afdo::run_ablation(corpus, 0.20, 42);
  REQUIRE(cells.size() == 3 * 5);
  std::size_t all_rows = 0;
  for (const auto& cell : cells) {
    if (cell.bucket == "all") {
      ++all_rows;
      CHECK(cell.n_records == corpus.size());
    }
  }
  CHECK(all_rows == 3);
  // Bucket rows partition the corpus.
  std::size_t twm_bucket_total = 0;
  for (const auto& cell : cells) {
    if (cell.strategy == afdo::Strategy::TrimmedWeightedMean && cell.bucket != "all") {
      twm_bucket_total += cell.n_records;
    }
  }
  CHECK(twm_bucket_total == corpus.size());
}

TEST_CASE("theta sensitivity emits one row per grid point") {
  auto spec = afdo::default_corpus_spec(0.05, 42);
  auto corpus = afdo::generate_corpus(spec);
  std::vector<double> grid(std::begin(afdo::kThetaGrid), std::end(afdo::kThetaGrid));
  auto cells = afdo::run_theta_sensitivity(corpus, grid, 42);
  REQUIRE(cells.size() == grid.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].theta == grid[i]);
    CHECK(cells[i].n_records == corpus.size());
    CHECK(cells[i].ci_low <= cells[i].accuracy);
    CHECK(cells[i].ci_high >= cells[i].accuracy);
  }
}

TEST_CASE("csv emitters share the fixed schema header") {
  auto spec = afdo::default_corpus_spec(0.05, 42);
  auto corpus = afdo::generate_corpus(spec);
  afdo::SweepConfig config;
  config.fractions = {0.0};
  config.trials = 1;
  config.bootstrap_resamples = 50;
  auto sweep_csv = afdo::sweep_to_csv(afdo::run_sweep(corpus, config));
  auto ablation_csv = afdo::ablation_to_csv(afdo::run_ablation(corpus, 0.20, 42), 0.20);
  auto theta_csv = afdo::theta_to_csv(afdo::run_theta_sensitivity(corpus, {0.20}, 42));
  const std::string header =
      "model,fraction,strategy,theta,bucket,n_records,accuracy,ci_low,ci_high\n";
  CHECK(sweep_csv.rfind(header, 0) == 0);
  CHECK(ablation_csv.rfind(header, 0) == 0);
  CHECK(theta_csv.rfind(header, 0) == 0);
  // Fraction fixed-2, accuracies fixed-6.
  CHECK(sweep_csv.find("sybil,0.00,twm,0.20,all,") != std::string::npos);
  CHECK(ablation_csv.find("\nnone,0.00,twm,0.20,") != std::string::npos);
  std::istringstream lines(theta_csv);
  std::string line;
  std::getline(lines, line);  // header
  std::getline(lines, line);
  CHECK(line.rfind("none,0.00,twm,0.20,all,", 0) == 0);
}
