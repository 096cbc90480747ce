#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace afdo {

// ---------------------------------------------------------------------------
// Classification scale
// ---------------------------------------------------------------------------

// Five-level ordinal pathogenicity scale. Ordinal order matches score order.
enum class Classification : int {
  Benign = 0,
  LikelyBenign = 1,
  VUS = 2,
  LikelyPathogenic = 3,
  Pathogenic = 4,
};

inline constexpr std::array<Classification, 5> kAllClassifications = {
    Classification::Benign, Classification::LikelyBenign, Classification::VUS,
    Classification::LikelyPathogenic, Classification::Pathogenic};

// Fixed scale: Benign 0.0, Likely benign 0.25, VUS 0.5, Likely pathogenic
// 0.75, Pathogenic 1.0.
double classification_to_score(Classification c);

// How to resolve an exact midpoint between two scale values (0.125, 0.375,
// 0.625, 0.875). The default resolves toward the less pathogenic label.
enum class MidpointTie { TowardLower, TowardHigher };

// Nearest scale value wins; out-of-range scores are rejected.
Classification score_to_classification(double score, MidpointTie tie = MidpointTie::TowardLower);

std::string to_string(Classification c);
Classification classification_from_string(std::string_view s);

// ---------------------------------------------------------------------------
// Submissions and conflicts
// ---------------------------------------------------------------------------

enum class SubmitterCategory { ClinicalLab, ResearchLab, Individual, ExpertPanel };

std::string to_string(SubmitterCategory c);
SubmitterCategory category_from_string(std::string_view s);

// One participant's classification of a target, with the reputation and
// confidence that form its consensus weight.
struct Submission {
  std::string submitter_id;  // hashed identifier
  SubmitterCategory category = SubmitterCategory::ClinicalLab;
  Classification classification = Classification::VUS;
  double reputation = 0.0;   // R in [0,1]
  double confidence = 0.0;   // conf in [0,1]
  std::int64_t order_index = 0;  // arrival rank, used by first-wins
  std::string review_status;

  double weight() const { return reputation * confidence; }
  double score() const { return classification_to_score(classification); }
};

// Throws std::invalid_argument when reputation/confidence leave [0,1].
void validate_submission(const Submission& s);

// Major-group partition of the scale: {Pathogenic, LikelyPathogenic},
// {VUS}, {Benign, LikelyBenign}.
enum class MajorGroup { BenignSide = 0, Uncertain = 1, PathogenicSide = 2 };

MajorGroup major_group(Classification c);

enum class DisagreementBucket { PlpVsVus, VusVsLbb, PlpVsLbb, ThreeGroupSpan };

inline constexpr std::array<DisagreementBucket, 4> kAllBuckets = {
    DisagreementBucket::PlpVsVus, DisagreementBucket::VusVsLbb,
    DisagreementBucket::PlpVsLbb, DisagreementBucket::ThreeGroupSpan};

std::string to_string(DisagreementBucket b);
DisagreementBucket bucket_from_string(std::string_view s);

// Bucket is a pure function of the set of major groups present. Single-group
// input is not a conflict and is rejected.
DisagreementBucket classify_bucket(std::span<const Submission> submissions);

// One target with held-out expert adjudication and the disagreeing
// submissions it is scored against.
struct ConflictRecord {
  std::string target_id;
  Submission ground_truth;  // category ExpertPanel, never a consensus input
  std::vector<Submission> submissions;
  DisagreementBucket bucket = DisagreementBucket::PlpVsVus;
};

// Checks the record invariants: >=2 distinct submitters, >=2 major groups,
// expert-panel ground truth, bucket consistent with submissions.
void validate_conflict_record(const ConflictRecord& r);

// ---------------------------------------------------------------------------
// FDO records
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 4> kMandatoryOperations = {
    "Create", "Retrieve", "Update", "Delete"};

struct FDORecord {
  std::string pid;
  std::string fdo_type;
  std::vector<std::string> operations;  // unique, includes the four mandatory
  std::map<std::string, std::string> metadata;

  bool has_operation(std::string_view name) const;
};

// Non-empty pid and the four mandatory operation names.
void validate_fdo(const FDORecord& r);

}  // namespace afdo
