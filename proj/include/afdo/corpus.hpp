#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "afdo/core_model.hpp"

namespace afdo {

// ---------------------------------------------------------------------------
// Reputation / confidence assignment
// ---------------------------------------------------------------------------

// Expert panels are ground truth, never consensus inputs; asking for their
// reputation is an error.
double assign_reputation(SubmitterCategory category);

// Review statuses carried by submissions, snake_case on the wire.
inline constexpr std::string_view kStatusMultipleNoConflicts =
    "criteria_provided_multiple_submitters_no_conflicts";
inline constexpr std::string_view kStatusSingleSubmitter =
    "criteria_provided_single_submitter";
inline constexpr std::string_view kStatusConflicting =
    "criteria_provided_conflicting_interpretations";
inline constexpr std::string_view kStatusNoCriteria = "no_assertion_criteria_provided";
// Expert-panel statuses, valid only on ground truth.
inline constexpr std::string_view kStatusExpertPanel = "reviewed_by_expert_panel";
inline constexpr std::string_view kStatusPracticeGuideline = "practice_guideline";

double assign_confidence(std::string_view review_status);
bool is_expert_panel_status(std::string_view review_status);

// ---------------------------------------------------------------------------
// Raw pre-filter rows and the filter pipeline
// ---------------------------------------------------------------------------

struct RawSubmission {
  std::string submitter_name;
  std::string category;        // clinical_lab / research_lab / individual / expert_panel
  std::string classification;  // five-level label, empty means no assertion
  std::string review_status;
};

struct RawVariantRow {
  std::string variant_id;
  std::vector<RawSubmission> submissions;
};

// Tab-delimited, one line per submission, grouped by variant id. Header:
// variant_id<TAB>submitter<TAB>category<TAB>classification<TAB>review_status
std::vector<RawVariantRow> read_raw_rows_tsv(std::istream& in);
void write_raw_rows_tsv(const std::vector<RawVariantRow>& rows, std::ostream& out);

struct FilterOutcome {
  std::vector<ConflictRecord> records;
  // Input count followed by survivors of each stage:
  // >=2 distinct submitters, expert-panel adjudication present,
  // >=2 non-expert-panel submissions, major-class disagreement.
  std::array<std::size_t, 5> stage_counts{};
};

FilterOutcome filter_pipeline(const std::vector<RawVariantRow>& rows);

// ---------------------------------------------------------------------------
// Synthetic corpus generation
// ---------------------------------------------------------------------------

// Reference per-bucket counts for the full-scale corpus, in kAllBuckets
// order: PLP_vs_VUS, VUS_vs_LBB, PLP_vs_LBB, ThreeGroupSpan.
inline constexpr std::array<std::size_t, 4> kFullScaleBucketCounts = {1744, 1918, 65, 187};

// Scales the reference counts by rounding cumulative sums, which keeps the
// total consistent at every scale (0.1 gives 174/192/7/18, total 391).
std::array<std::size_t, 4> scaled_bucket_counts(double scale);

struct CategoryMix {
  double clinical_lab = 0.422;
  double research_lab = 0.118;
  double individual = 0.460;
};

// Share of each non-expert review status among generated submissions. The
// source data reports no mix; these are documented configuration.
struct ReviewStatusMix {
  double multiple_no_conflicts = 0.20;
  double single_submitter = 0.45;
  double conflicting = 0.25;
  double no_criteria = 0.10;
};

// Probability that a generated submission agrees with the weight-majority
// group of its record, per bucket. Higher bias makes the bucket easier for
// weighted aggregation; values are documented configuration, not source
// statistics.
struct BucketBias {
  double plp_vs_vus = 0.90;
  double vus_vs_lbb = 0.90;
  double plp_vs_lbb = 0.94;
  double three_group_span = 0.80;

  double for_bucket(DisagreementBucket bucket) const;
};

struct CorpusSpec {
  std::array<std::size_t, 4> bucket_counts = kFullScaleBucketCounts;
  double mean_submissions = 8.5;
  int min_submissions = 2;
  int max_submissions = 40;
  CategoryMix category_mix;
  ReviewStatusMix status_mix;
  BucketBias bias;
  std::uint64_t seed = 42;

  std::size_t total_records() const;
};

void validate_spec(const CorpusSpec& spec);

CorpusSpec default_corpus_spec(double scale = 0.1, std::uint64_t seed = 42);

// Fully seed-determined; every record passes the filter-pipeline conditions
// and classify_bucket(record.submissions) == record.bucket.
std::vector<ConflictRecord> generate_corpus(const CorpusSpec& spec);

// ---------------------------------------------------------------------------
// Corpus serialisation (line-delimited JSON, Listing-style field layout)
// ---------------------------------------------------------------------------

std::string conflict_record_to_json(const ConflictRecord& record);
ConflictRecord conflict_record_from_json(const std::string& line);

void write_corpus_jsonl(const std::vector<ConflictRecord>& records, std::ostream& out);
std::vector<ConflictRecord> read_corpus_jsonl(std::istream& in);

void write_corpus_file(const std::vector<ConflictRecord>& records, const std::string& path);
std::vector<ConflictRecord> read_corpus_file(const std::string& path);

}  // namespace afdo
