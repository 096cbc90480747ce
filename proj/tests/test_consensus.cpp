#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "afdo/audit.hpp"
#include "afdo/consensus.hpp"
#include "afdo/core_model.hpp"
#include "exact_oracle.hpp"

namespace {

using afdo::Classification;
using afdo::Submission;

Submission sub(std::string id, Classification c, double reputation, double confidence,
               std::int64_t order = 0) {
  Submission s;
  s.submitter_id = std::move(id);
  s.classification = c;
  s.reputation = reputation;
  s.confidence = confidence;
  s.order_index = order;
  return s;
}

// The five-submission example: weights 0.15, 0.525, 0.60, 0.68, 0.765 against
// scores 0.0, 0.5, 0.75, 0.75, 1.0 at theta = 0.20.
std::vector<Submission> worked_example() {
  return {
      sub("lab-a", Classification::Benign, 0.15, 1.0, 0),
      sub("lab-b", Classification::VUS, 0.525, 1.0, 1),
      sub("lab-c", Classification::LikelyPathogenic, 0.60, 1.0, 2),
      sub("lab-d", Classification::LikelyPathogenic, 0.68, 1.0, 3),
      sub("lab-e", Classification::Pathogenic, 0.765, 1.0, 4),
  };
}

using oracle::cpp_rational;
using oracle::to_double_nearest;
using oracle::ulp_distance;

double oracle_twm(std::vector<Submission> subs, double theta) {
  return oracle::trimmed_weighted_mean(std::move(subs), theta);
}

}  // namespace

TEST_CASE("rational-to-double helper is exact on representable values") {
  CHECK(to_double_nearest(cpp_rational(0)) == 0.0);
  CHECK(to_double_nearest(cpp_rational(1)) == 1.0);
  CHECK(to_double_nearest(cpp_rational(1, 2)) == 0.5);
  CHECK(to_double_nearest(cpp_rational(3, 4)) == 0.75);
  CHECK(to_double_nearest(cpp_rational(1, 1024)) == 0.0009765625);
  // 1/3 rounds to the nearest double.
  CHECK(to_double_nearest(cpp_rational(1, 3)) == 1.0 / 3.0);
  CHECK(to_double_nearest(cpp_rational(2, 3)) == 2.0 / 3.0);
  CHECK(to_double_nearest(cpp_rational(1, 10)) == 0.1);
  CHECK(to_double_nearest(cpp_rational(6772853185595568LL, 10000000000000000LL)) ==
        0.6772853185595568);
}

TEST_CASE("worked example: 0.677 and likely pathogenic") {
  auto subs = worked_example();
  auto out = afdo::trimmed_weighted_mean(subs, 0.20);
  CHECK(out.consensus_score == doctest::Approx(0.6772853185595568).epsilon(1e-12));
  CHECK(out.consensus_class == Classification::LikelyPathogenic);
  CHECK(out.trim_per_side == 1);
  CHECK_FALSE(out.trim_skipped);
  // Trimmed: the benign extreme and the pathogenic extreme.
  REQUIRE(out.trimmed_out.size() == 2);
  CHECK(out.trimmed_out[0] == 0);
  CHECK(out.trimmed_out[1] == 4);
  REQUIRE(out.included.size() == 3);
  CHECK(out.weights_used.size() == 5);
  CHECK(out.weights_used[1] == doctest::Approx(0.525));
  // Oracle agreement on the flagship numbers.
  CHECK(ulp_distance(out.consensus_score, oracle_twm(subs, 0.20)) <= 1);
}

TEST_CASE("trim_count floor and ceil rules") {
  CHECK(afdo::trim_count(5, 0.20) == 1);
  CHECK(afdo::trim_count(10, 0.20) == 2);
  CHECK(afdo::trim_count(12, 0.20) == 2);
  // Floor would give 0; the minimum of one survives.
  CHECK(afdo::trim_count(4, 0.05) == 1);
  CHECK(afdo::trim_count(5, 0.30, afdo::TrimRule::Ceil) == 2);
  CHECK(afdo::trim_count(10, 0.11, afdo::TrimRule::Ceil) == 2);
  CHECK_THROWS_AS(afdo::trim_count(0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(afdo::trim_count(5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(afdo::trim_count(5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(afdo::trim_count(5, -0.1), std::invalid_argument);
}

TEST_CASE("trim is skipped when it would consume the whole set") {
  std::vector<Submission> subs = {
      sub("a", Classification::Benign, 0.5, 1.0),
      sub("b", Classification::Pathogenic, 0.5, 1.0),
  };
  auto out = afdo::trimmed_weighted_mean(subs, 0.20);
  CHECK(out.trim_skipped);
  CHECK(out.included.size() == 2);
  CHECK(out.trimmed_out.empty());
  CHECK(out.consensus_score == doctest::Approx(0.5));
  CHECK(out.consensus_class == Classification::VUS);
}

TEST_CASE("sort ties break by weight then submitter id") {
  // All VUS except the extremes; equal scores inside, so the trim boundary is
  // decided by weight and then by id.
  std::vector<Submission> subs = {
      sub("x1", Classification::VUS, 0.30, 1.0),
      sub("x2", Classification::VUS, 0.10, 1.0),
      sub("x3", Classification::VUS, 0.30, 1.0),
  };
  auto out = afdo::trimmed_weighted_mean(subs, 0.34);
  REQUIRE(out.trimmed_out.size() == 2);
  // Lowest: weight 0.10 (x2). Highest: weight tie 0.30/0.30 resolved by id,
  // so x3 outranks x1.
  CHECK(out.trimmed_out[0] == 1);
  CHECK(out.trimmed_out[1] == 2);
  REQUIRE(out.included.size() == 1);
  CHECK(out.included[0] == 0);
}

TEST_CASE("all-zero surviving weight falls back to the unweighted mean") {
  std::vector<Submission> subs = {
      sub("a", Classification::Benign, 0.0, 0.0),
      sub("b", Classification::VUS, 0.0, 0.0),
      sub("c", Classification::Pathogenic, 0.0, 0.0),
  };
  auto out = afdo::trimmed_weighted_mean(subs, 0.20);
  CHECK(out.zero_weight_fallback);
  CHECK(out.consensus_score == doctest::Approx(0.5));
  CHECK(ulp_distance(out.consensus_score, oracle_twm(subs, 0.20)) <= 1);
}

TEST_CASE("empty input is rejected by every strategy") {
  std::vector<Submission> none;
  CHECK_THROWS_AS(afdo::trimmed_weighted_mean(none, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(afdo::simple_majority(none), std::invalid_argument);
  CHECK_THROWS_AS(afdo::first_wins(none), std::invalid_argument);
}

TEST_CASE("simple majority is a plurality with ties toward the lower label") {
  std::vector<Submission> subs = {
      sub("a", Classification::Benign, 0.9, 1.0),
      sub("b", Classification::Benign, 0.9, 1.0),
      sub("c", Classification::Pathogenic, 0.9, 1.0),
      sub("d", Classification::Pathogenic, 0.9, 1.0),
      sub("e", Classification::VUS, 0.9, 1.0),
  };
  auto out = afdo::simple_majority(subs);
  CHECK(out.consensus_class == Classification::Benign);
  CHECK(out.strategy == afdo::Strategy::SimpleMajority);
  CHECK(out.included.size() == 5);

  subs.push_back(sub("f", Classification::Pathogenic, 0.1, 0.1));
  out = afdo::simple_majority(subs);
  CHECK(out.consensus_class == Classification::Pathogenic);
}

TEST_CASE("first wins keeps the earliest order index and rejects duplicates") {
  std::vector<Submission> subs = {
      sub("late", Classification::Pathogenic, 0.9, 1.0, 7),
      sub("early", Classification::LikelyBenign, 0.2, 0.5, 3),
  };
  auto out = afdo::first_wins(subs);
  CHECK(out.consensus_class == Classification::LikelyBenign);
  REQUIRE(out.included.size() == 1);
  CHECK(out.included[0] == 1);

  subs.push_back(sub("dupe", Classification::VUS, 0.5, 0.5, 3));
  CHECK_THROWS_AS(afdo::first_wins(subs), std::invalid_argument);
}

TEST_CASE("midpoint scores resolve by the configured tie rule") {
  // 0.625 is exactly between VUS and LikelyPathogenic.
  std::vector<Submission> subs = {
      sub("a", Classification::VUS, 0.5, 1.0),
      sub("b", Classification::LikelyPathogenic, 0.5, 1.0),
  };
  auto lower = afdo::trimmed_weighted_mean(subs, 0.2, afdo::TrimRule::Floor,
                                           afdo::MidpointTie::TowardLower);
  CHECK(lower.consensus_score == doctest::Approx(0.625));
  CHECK(lower.consensus_class == Classification::VUS);
  auto higher = afdo::trimmed_weighted_mean(subs, 0.2, afdo::TrimRule::Floor,
                                            afdo::MidpointTie::TowardHigher);
  CHECK(higher.consensus_class == Classification::LikelyPathogenic);
}

TEST_CASE("run_strategy dispatches on the configured strategy") {
  auto subs = worked_example();
  afdo::ConsensusConfig config;
  config.strategy = afdo::Strategy::FirstWins;
  auto out = afdo::run_strategy(subs, config);
  CHECK(out.strategy == afdo::Strategy::FirstWins);
  CHECK(out.consensus_class == Classification::Benign);
  config.strategy = afdo::Strategy::SimpleMajority;
  CHECK(afdo::run_strategy(subs, config).consensus_class == Classification::LikelyPathogenic);
}

TEST_CASE("strategy names round-trip") {
  for (auto s : {afdo::Strategy::TrimmedWeightedMean, afdo::Strategy::SimpleMajority,
                 afdo::Strategy::FirstWins}) {
    CHECK(afdo::strategy_from_string(afdo::to_string(s)) == s);
  }
  CHECK(afdo::to_string(afdo::Strategy::TrimmedWeightedMean) == "twm");
  CHECK_THROWS_AS(afdo::strategy_from_string("median"), std::invalid_argument);
}

TEST_CASE("detect_conflict requires same target and different class") {
  afdo::Interpretation a{"v1", Classification::VUS};
  afdo::Interpretation b{"v1", Classification::Pathogenic};
  afdo::Interpretation c{"v2", Classification::Pathogenic};
  CHECK(afdo::detect_conflict(a, b));
  CHECK_FALSE(afdo::detect_conflict(b, c));
  CHECK_FALSE(afdo::detect_conflict(a, a));
}

TEST_CASE("agreement round excludes late arrivals and audits the outcome") {
  afdo::ConsensusConfig config;  // timeout 60'000
  afdo::AgreementRound round("variant-1", 0, config);
  round.receive(sub("a", Classification::VUS, 0.8, 0.9, 0), 10);
  round.receive(sub("b", Classification::Pathogenic, 0.7, 0.9, 1), 60'000);
  round.receive(sub("late", Classification::Benign, 0.9, 0.9, 2), 60'001);
  CHECK(round.on_time_count() == 2);

  afdo::AuditLog log;
  auto out = round.close(log);
  REQUIRE(out.has_value());
  CHECK(out->included.size() + out->trimmed_out.size() == 2);
  CHECK(round.state() == afdo::AgreementRound::State::Closed);
  REQUIRE(log.size() == 1);
  CHECK(log.at(0).activity == "consensus_round");
  CHECK(log.at(0).timestamp == round.deadline());

  CHECK_THROWS_AS(round.receive(sub("x", Classification::VUS, 0.5, 0.5), 5), std::logic_error);
  CHECK_THROWS_AS(round.close(log), std::logic_error);
}

TEST_CASE("void round returns nullopt and writes no audit record") {
  afdo::ConsensusConfig config;
  afdo::AgreementRound round("variant-2", 0, config);
  round.receive(sub("late", Classification::VUS, 0.5, 0.5), 99'999);
  afdo::AuditLog log;
  CHECK_FALSE(round.close(log).has_value());
  CHECK(log.size() == 0);
}

TEST_CASE("equal arrival times order by submitter id") {
  afdo::ConsensusConfig config;
  config.strategy = afdo::Strategy::FirstWins;
  std::vector<afdo::TimedSubmission> timed = {
      {sub("zz", Classification::Pathogenic, 0.5, 0.5, 0), 5},
      {sub("aa", Classification::Benign, 0.5, 0.5, 1), 5},
  };
  afdo::AuditLog log;
  // first_wins consumes order_index, which run_round reassigns from the
  // deterministic (arrival, submitter_id) ordering.
  auto out = afdo::run_round("variant-3", timed, config, log);
  REQUIRE(out.has_value());
  CHECK(out->consensus_class == Classification::Benign);
}

TEST_CASE("outcome json names every input and the trim decision") {
  auto subs = worked_example();
  auto out = afdo::trimmed_weighted_mean(subs, 0.20);
  std::string json = afdo::outcome_to_json(out, subs);
  for (const auto& s : subs) {
    CHECK(json.find(s.submitter_id) != std::string::npos);
  }
  CHECK(json.find("trim_per_side") != std::string::npos);
  CHECK(json.find("consensus_score") != std::string::npos);
}

TEST_CASE("exact rational oracle: 1000 random instances within 1 ulp") {
  std::mt19937_64 rng(0xA5F0'1234'5678'9ABCULL);
  std::uniform_int_distribution<int> n_dist(2, 12);
  std::uniform_int_distribution<int> class_dist(0, 4);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_real_distribution<double> theta_dist(0.01, 0.49);

  std::int64_t worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = n_dist(rng);
    std::vector<Submission> subs;
    subs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      char id[8];
      std::snprintf(id, sizeof id, "s%03d", i);
      subs.push_back(sub(id, static_cast<Classification>(class_dist(rng)), unit(rng), unit(rng),
                         i));
    }
    double theta = theta_dist(rng);
    double got = afdo::trimmed_weighted_mean(subs, theta).consensus_score;
    double want = oracle_twm(subs, theta);
    worst = std::max(worst, ulp_distance(got, want));
  }
  CHECK(worst <= 1);
}

TEST_CASE("byzantine containment: outliers beyond the trim never move the mean outside "
          "the honest range") {
  std::mt19937_64 rng(0x0BAD'F00D'CAFE'0001ULL);
  std::uniform_int_distribution<int> honest_n(3, 7);
  std::uniform_int_distribution<int> side(0, 2);
  std::uniform_real_distribution<double> unit(0.05, 1.0);

  int violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    // Honest window: a contiguous label range excluding at least one extreme.
    int lo_label = 1 + side(rng) % 2;       // 1 or 2
    int hi_label = lo_label + side(rng) % 2;  // width 1 or 2
    int n_honest = honest_n(rng);
    std::vector<Submission> subs;
    std::uniform_int_distribution<int> label(lo_label, hi_label);
    for (int i = 0; i < n_honest; ++i) {
      subs.push_back(sub("h" + std::to_string(i), static_cast<Classification>(label(rng)),
                         unit(rng), unit(rng), i));
    }
    // At most k adversarial submissions per side, pinned to the extremes.
    // Clamping can shrink n and with it k, so iterate to a fixed point.
    std::size_t adv_low = static_cast<std::size_t>(side(rng));
    std::size_t adv_high = static_cast<std::size_t>(side(rng));
    for (;;) {
      std::size_t total = static_cast<std::size_t>(n_honest) + adv_low + adv_high;
      std::size_t k = afdo::trim_count(total, 0.20);
      std::size_t next_low = std::min(adv_low, k);
      std::size_t next_high = std::min(adv_high, k);
      if (next_low == adv_low && next_high == adv_high) {
        break;
      }
      adv_low = next_low;
      adv_high = next_high;
    }
    for (std::size_t i = 0; i < adv_low; ++i) {
      subs.push_back(sub("byz-lo-" + std::to_string(i), Classification::Benign, unit(rng),
                         unit(rng), static_cast<std::int64_t>(subs.size())));
    }
    for (std::size_t i = 0; i < adv_high; ++i) {
      subs.push_back(sub("byz-hi-" + std::to_string(i), Classification::Pathogenic, unit(rng),
                         unit(rng), static_cast<std::int64_t>(subs.size())));
    }
    if (2 * afdo::trim_count(subs.size(), 0.20) >= subs.size()) {
      continue;  // trim skipped: containment is not claimed there
    }
    auto out = afdo::trimmed_weighted_mean(subs, 0.20);
    double lo = afdo::classification_to_score(static_cast<Classification>(lo_label));
    double hi = afdo::classification_to_score(static_cast<Classification>(hi_label));
    if (out.consensus_score < lo - 1e-12 || out.consensus_score > hi + 1e-12) {
      ++violations;
    }
  }
  CHECK(violations == 0);
}
