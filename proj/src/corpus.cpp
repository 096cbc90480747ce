#include "afdo/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "afdo/hash.hpp"
#include "afdo/rng.hpp"

namespace afdo {

double assign_reputation(SubmitterCategory category) {
  switch (category) {
    case SubmitterCategory::ClinicalLab: return 0.85;
    case SubmitterCategory::ResearchLab: return 0.70;
    case SubmitterCategory::Individual: return 0.55;
    case SubmitterCategory::ExpertPanel:
      throw std::invalid_argument(
          "expert panels are ground truth, not consensus inputs");
  }
  throw std::invalid_argument("unknown submitter category value");
}

double assign_confidence(std::string_view review_status) {
  if (review_status == kStatusMultipleNoConflicts) return 0.85;
  if (review_status == kStatusSingleSubmitter) return 0.70;
  if (review_status == kStatusConflicting) return 0.55;
  if (review_status == kStatusNoCriteria) return 0.40;
  throw std::invalid_argument("unknown review status: " + std::string(review_status));
}

bool is_expert_panel_status(std::string_view review_status) {
  return review_status == kStatusExpertPanel ||
         review_status == kStatusPracticeGuideline;
}

// ---------------------------------------------------------------------------
// Raw rows
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

constexpr std::string_view kTsvHeader =
    "variant_id\tsubmitter\tcategory\tclassification\treview_status";

}  // namespace

std::vector<RawVariantRow> read_raw_rows_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("raw TSV input is empty");
  }
  if (line != kTsvHeader) {
    throw std::invalid_argument("raw TSV header mismatch, expected: " +
                                std::string(kTsvHeader));
  }
  std::vector<RawVariantRow> rows;
  std::map<std::string, std::size_t> index;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 5) {
      throw std::invalid_argument("raw TSV line " + std::to_string(line_number) +
                                  " has " + std::to_string(fields.size()) +
                                  " fields, expected 5");
    }
    const std::string& variant_id = fields[0];
    auto it = index.find(variant_id);
    if (it == index.end()) {
      it = index.emplace(variant_id, rows.size()).first;
      rows.push_back(RawVariantRow{variant_id, {}});
    }
    rows[it->second].submissions.push_back(
        RawSubmission{fields[1], fields[2], fields[3], fields[4]});
  }
  return rows;
}

void write_raw_rows_tsv(const std::vector<RawVariantRow>& rows, std::ostream& out) {
  out << kTsvHeader << '\n';
  for (const RawVariantRow& row : rows) {
    for (const RawSubmission& s : row.submissions) {
      out << row.variant_id << '\t' << s.submitter_name << '\t' << s.category << '\t'
          << s.classification << '\t' << s.review_status << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Filter pipeline
// ---------------------------------------------------------------------------

namespace {

// A consensus-usable submission: not expert panel, classification parseable.
bool usable_submission(const RawSubmission& s) {
  if (is_expert_panel_status(s.review_status) || s.category == "expert_panel") {
    return false;
  }
  if (s.classification.empty()) {
    return false;
  }
  try {
    classification_from_string(s.classification);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

const RawSubmission* find_adjudication(const RawVariantRow& row) {
  for (const RawSubmission& s : row.submissions) {
    if ((is_expert_panel_status(s.review_status) || s.category == "expert_panel") &&
        !s.classification.empty()) {
      try {
        classification_from_string(s.classification);
        return &s;
      } catch (const std::invalid_argument&) {
        continue;
      }
    }
  }
  return nullptr;
}

// Unknown or unattributed categories count as individual submitters.
SubmitterCategory category_or_individual(const std::string& text) {
  if (text == "clinical_lab") return SubmitterCategory::ClinicalLab;
  if (text == "research_lab") return SubmitterCategory::ResearchLab;
  if (text == "expert_panel") return SubmitterCategory::ExpertPanel;
  return SubmitterCategory::Individual;
}

ConflictRecord row_to_record(const RawVariantRow& row, const RawSubmission& adjudication) {
  ConflictRecord record;
  record.target_id = row.variant_id;

  record.ground_truth.submitter_id = hash_submitter(adjudication.submitter_name);
  record.ground_truth.category = SubmitterCategory::ExpertPanel;
  record.ground_truth.classification =
      classification_from_string(adjudication.classification);
  record.ground_truth.reputation = 1.0;
  record.ground_truth.confidence = 1.0;
  record.ground_truth.review_status = adjudication.review_status;

  std::int64_t order = 0;
  for (const RawSubmission& s : row.submissions) {
    if (!usable_submission(s)) {
      continue;
    }
    Submission submission;
    submission.submitter_id = hash_submitter(s.submitter_name);
    submission.category = category_or_individual(s.category);
    submission.classification = classification_from_string(s.classification);
    submission.reputation = assign_reputation(submission.category);
    submission.confidence = assign_confidence(s.review_status);
    submission.order_index = order++;
    submission.review_status = s.review_status;
    record.submissions.push_back(std::move(submission));
  }
  record.bucket = classify_bucket(record.submissions);
  return record;
}

}  // namespace

FilterOutcome filter_pipeline(const std::vector<RawVariantRow>& rows) {
  FilterOutcome outcome;
  outcome.stage_counts[0] = rows.size();

  std::vector<const RawVariantRow*> current;
  for (const RawVariantRow& row : rows) {
    std::set<std::string> submitters;
    for (const RawSubmission& s : row.submissions) {
      submitters.insert(s.submitter_name);
    }
    if (submitters.size() >= 2) {
      current.push_back(&row);
    }
  }
  outcome.stage_counts[1] = current.size();

  std::vector<std::pair<const RawVariantRow*, const RawSubmission*>> adjudicated;
  for (const RawVariantRow* row : current) {
    if (const RawSubmission* adjudication = find_adjudication(*row)) {
      adjudicated.emplace_back(row, adjudication);
    }
  }
  outcome.stage_counts[2] = adjudicated.size();

  std::erase_if(adjudicated, [](const auto& entry) {
    std::size_t usable = 0;
    for (const RawSubmission& s : entry.first->submissions) {
      if (usable_submission(s)) {
        ++usable;
      }
    }
    return usable < 2;
  });
  outcome.stage_counts[3] = adjudicated.size();

  for (const auto& [row, adjudication] : adjudicated) {
    std::set<MajorGroup> groups;
    for (const RawSubmission& s : row->submissions) {
      if (usable_submission(s)) {
        groups.insert(major_group(classification_from_string(s.classification)));
      }
    }
    if (groups.size() >= 2) {
      outcome.records.push_back(row_to_record(*row, *adjudication));
    }
  }
  outcome.stage_counts[4] = outcome.records.size();
  return outcome;
}

// ---------------------------------------------------------------------------
// Synthetic generation
// ---------------------------------------------------------------------------

std::array<std::size_t, 4> scaled_bucket_counts(double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("scale must be positive");
  }
  // Rounding the cumulative sums (half up) keeps the scaled total equal to
  // round(total * scale) at every scale.
  std::array<std::size_t, 4> counts{};
  std::size_t cumulative = 0;
  std::size_t previous = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    cumulative += kFullScaleBucketCounts[i];
    const std::size_t scaled =
        static_cast<std::size_t>(std::floor(static_cast<double>(cumulative) * scale + 0.5));
    counts[i] = scaled - previous;
    previous = scaled;
  }
  return counts;
}

double BucketBias::for_bucket(DisagreementBucket bucket) const {
  switch (bucket) {
    case DisagreementBucket::PlpVsVus: return plp_vs_vus;
    case DisagreementBucket::VusVsLbb: return vus_vs_lbb;
    case DisagreementBucket::PlpVsLbb: return plp_vs_lbb;
    case DisagreementBucket::ThreeGroupSpan: return three_group_span;
  }
  throw std::invalid_argument("unknown bucket value");
}

std::size_t CorpusSpec::total_records() const {
  return std::accumulate(bucket_counts.begin(), bucket_counts.end(), std::size_t{0});
}

void validate_spec(const CorpusSpec& spec) {
  if (spec.min_submissions < 2) {
    throw std::invalid_argument("min_submissions must be >= 2");
  }
  if (spec.max_submissions < spec.min_submissions) {
    throw std::invalid_argument("max_submissions below min_submissions");
  }
  if (!(spec.mean_submissions >= spec.min_submissions &&
        spec.mean_submissions <= spec.max_submissions)) {
    throw std::invalid_argument("mean_submissions outside [min, max]");
  }
  if (spec.bucket_counts[3] > 0 && spec.max_submissions < 3) {
    throw std::invalid_argument("three-group records need >= 3 submissions");
  }
  const double category_total = spec.category_mix.clinical_lab +
                                spec.category_mix.research_lab +
                                spec.category_mix.individual;
  if (std::fabs(category_total - 1.0) > 1e-9) {
    throw std::invalid_argument("category mix must sum to 1");
  }
  const double status_total = spec.status_mix.multiple_no_conflicts +
                              spec.status_mix.single_submitter +
                              spec.status_mix.conflicting + spec.status_mix.no_criteria;
  if (std::fabs(status_total - 1.0) > 1e-9) {
    throw std::invalid_argument("review status mix must sum to 1");
  }
  for (const DisagreementBucket bucket : kAllBuckets) {
    const double bias = spec.bias.for_bucket(bucket);
    if (!(bias > 0.0 && bias < 1.0)) {
      throw std::invalid_argument("bucket bias must lie in (0, 1)");
    }
  }
}

CorpusSpec default_corpus_spec(double scale, std::uint64_t seed) {
  CorpusSpec spec;
  spec.bucket_counts = scaled_bucket_counts(scale);
  spec.seed = seed;
  return spec;
}

namespace {

std::vector<MajorGroup> bucket_groups(DisagreementBucket bucket) {
  switch (bucket) {
    case DisagreementBucket::PlpVsVus:
      return {MajorGroup::PathogenicSide, MajorGroup::Uncertain};
    case DisagreementBucket::VusVsLbb:
      return {MajorGroup::Uncertain, MajorGroup::BenignSide};
    case DisagreementBucket::PlpVsLbb:
      return {MajorGroup::PathogenicSide, MajorGroup::BenignSide};
    case DisagreementBucket::ThreeGroupSpan:
      return {MajorGroup::PathogenicSide, MajorGroup::Uncertain,
              MajorGroup::BenignSide};
  }
  throw std::invalid_argument("unknown bucket value");
}

Classification pick_in_group(MajorGroup group, Rng& rng) {
  switch (group) {
    case MajorGroup::PathogenicSide:
      return rng.uniform() < 0.5 ? Classification::Pathogenic
                                 : Classification::LikelyPathogenic;
    case MajorGroup::Uncertain:
      return Classification::VUS;
    case MajorGroup::BenignSide:
      return rng.uniform() < 0.5 ? Classification::Benign
                                 : Classification::LikelyBenign;
  }
  throw std::invalid_argument("unknown major group value");
}

Classification other_label_in_group(Classification c) {
  switch (c) {
    case Classification::Pathogenic: return Classification::LikelyPathogenic;
    case Classification::LikelyPathogenic: return Classification::Pathogenic;
    case Classification::VUS: return Classification::VUS;
    case Classification::Benign: return Classification::LikelyBenign;
    case Classification::LikelyBenign: return Classification::Benign;
  }
  throw std::invalid_argument("unknown classification value");
}

SubmitterCategory draw_category(const CategoryMix& mix, Rng& rng) {
  const double u = rng.uniform();
  if (u < mix.clinical_lab) return SubmitterCategory::ClinicalLab;
  if (u < mix.clinical_lab + mix.research_lab) return SubmitterCategory::ResearchLab;
  return SubmitterCategory::Individual;
}

std::string draw_status(const ReviewStatusMix& mix, Rng& rng) {
  const double u = rng.uniform();
  if (u < mix.multiple_no_conflicts) return std::string(kStatusMultipleNoConflicts);
  if (u < mix.multiple_no_conflicts + mix.single_submitter) {
    return std::string(kStatusSingleSubmitter);
  }
  if (u < mix.multiple_no_conflicts + mix.single_submitter + mix.conflicting) {
    return std::string(kStatusConflicting);
  }
  return std::string(kStatusNoCriteria);
}

// Synthetic submitter name pools, one namespace per category so names never
// collide across categories.
std::string pool_name(SubmitterCategory category, std::uint64_t index) {
  std::ostringstream out;
  switch (category) {
    case SubmitterCategory::ClinicalLab: out << "ClinicalLab-"; break;
    case SubmitterCategory::ResearchLab: out << "ResearchLab-"; break;
    case SubmitterCategory::Individual: out << "Individual-"; break;
    case SubmitterCategory::ExpertPanel: out << "ExpertPanel-"; break;
  }
  out << index;
  return out.str();
}

std::size_t pool_size(SubmitterCategory category) {
  switch (category) {
    case SubmitterCategory::ClinicalLab: return 400;
    case SubmitterCategory::ResearchLab: return 150;
    case SubmitterCategory::Individual: return 600;
    case SubmitterCategory::ExpertPanel: return 25;
  }
  throw std::invalid_argument("unknown submitter category value");
}

// Shifted geometric: minimum + failures before first success at
// p = 1 / (mean - minimum + 1), which has mean exactly `mean`, then capped.
int draw_submission_count(const CorpusSpec& spec, Rng& rng) {
  const double p = 1.0 / (spec.mean_submissions - spec.min_submissions + 1.0);
  double u = rng.uniform();
  while (u >= 1.0) {
    u = rng.uniform();
  }
  const int failures =
      static_cast<int>(std::floor(std::log(1.0 - u) / std::log(1.0 - p)));
  return std::min(spec.max_submissions, spec.min_submissions + failures);
}

ConflictRecord generate_record(const CorpusSpec& spec, DisagreementBucket bucket,
                               std::size_t global_index, std::uint64_t record_seed) {
  Rng rng(record_seed);
  const std::vector<MajorGroup> groups = bucket_groups(bucket);

  int n = draw_submission_count(spec, rng);
  n = std::max(n, static_cast<int>(groups.size()));

  // Adjudicated class comes from one designated majority group.
  const MajorGroup gt_group = groups[rng.uniform_int(groups.size())];
  const Classification gt_class = pick_in_group(gt_group, rng);

  // One submission per group guarantees the span; the rest lean toward the
  // adjudicated group with the bucket's bias.
  std::vector<MajorGroup> assignment(groups.begin(), groups.end());
  std::vector<MajorGroup> minority;
  for (const MajorGroup g : groups) {
    if (g != gt_group) {
      minority.push_back(g);
    }
  }
  const double bias = spec.bias.for_bucket(bucket);
  for (int i = static_cast<int>(groups.size()); i < n; ++i) {
    if (rng.uniform() < bias) {
      assignment.push_back(gt_group);
    } else {
      assignment.push_back(minority[rng.uniform_int(minority.size())]);
    }
  }

  // Within the adjudicated group, submissions mostly repeat the adjudicated
  // label; minority groups draw uniformly inside their group.
  constexpr double kWithinGroupAgreement = 0.92;

  ConflictRecord record;
  {
    std::ostringstream id;
    id << "SYN" << std::setfill('0') << std::setw(7) << (global_index + 1);
    record.target_id = id.str();
  }
  record.bucket = bucket;

  record.ground_truth.submitter_id = hash_submitter(
      pool_name(SubmitterCategory::ExpertPanel,
                global_index % pool_size(SubmitterCategory::ExpertPanel)));
  record.ground_truth.category = SubmitterCategory::ExpertPanel;
  record.ground_truth.classification = gt_class;
  record.ground_truth.reputation = 1.0;
  record.ground_truth.confidence = 1.0;
  record.ground_truth.review_status = std::string(kStatusExpertPanel);

  std::set<std::string> used_names;
  for (const MajorGroup group : assignment) {
    Submission submission;
    // Distinct submitter names within the record, by rejection against the
    // per-category pools.
    while (true) {
      const SubmitterCategory category = draw_category(spec.category_mix, rng);
      const std::string name = pool_name(category, rng.uniform_int(pool_size(category)));
      if (used_names.insert(name).second) {
        submission.submitter_id = hash_submitter(name);
        submission.category = category;
        break;
      }
    }
    if (group == gt_group) {
      submission.classification = rng.uniform() < kWithinGroupAgreement
                                      ? gt_class
                                      : other_label_in_group(gt_class);
    } else {
      submission.classification = pick_in_group(group, rng);
    }
    submission.review_status = draw_status(spec.status_mix, rng);
    submission.reputation = assign_reputation(submission.category);
    submission.confidence = assign_confidence(submission.review_status);
    record.submissions.push_back(std::move(submission));
  }

  // Arrival order is independent of generation order, so first-wins sees a
  // random submission rather than a majority-group one.
  rng.shuffle(record.submissions);
  for (std::size_t i = 0; i < record.submissions.size(); ++i) {
    record.submissions[i].order_index = static_cast<std::int64_t>(i);
  }
  return record;
}

}  // namespace

std::vector<ConflictRecord> generate_corpus(const CorpusSpec& spec) {
  validate_spec(spec);
  std::vector<ConflictRecord> records;
  records.reserve(spec.total_records());
  std::size_t global_index = 0;
  for (std::size_t b = 0; b < kAllBuckets.size(); ++b) {
    const DisagreementBucket bucket = kAllBuckets[b];
    for (std::size_t i = 0; i < spec.bucket_counts[b]; ++i) {
      const std::uint64_t record_seed = derive_seed(
          spec.seed, "record-" + to_string(bucket) + "-" + std::to_string(i));
      records.push_back(generate_record(spec, bucket, global_index, record_seed));
      ++global_index;
    }
  }
  for (const ConflictRecord& record : records) {
    validate_conflict_record(record);
  }
  return records;
}

// ---------------------------------------------------------------------------
// JSONL serialisation
// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json submission_to_json(const Submission& s, bool with_weights) {
  nlohmann::ordered_json j;
  j["submitter_hash"] = s.submitter_id;
  j["category"] = to_string(s.category);
  j["classification"] = to_string(s.classification);
  j["review_status"] = s.review_status;
  if (with_weights) {
    j["R"] = s.reputation;
    j["conf"] = s.confidence;
  }
  return j;
}

}  // namespace

std::string conflict_record_to_json(const ConflictRecord& record) {
  nlohmann::ordered_json j;
  j["variant_id"] = record.target_id;
  j["ground_truth"] = submission_to_json(record.ground_truth, false);
  nlohmann::ordered_json submissions = nlohmann::ordered_json::array();
  // File order is arrival order; order_index is implicit in the position.
  std::vector<const Submission*> sorted;
  for (const Submission& s : record.submissions) {
    sorted.push_back(&s);
  }
  std::sort(sorted.begin(), sorted.end(), [](const Submission* a, const Submission* b) {
    return a->order_index < b->order_index;
  });
  for (const Submission* s : sorted) {
    submissions.push_back(submission_to_json(*s, true));
  }
  j["submissions"] = submissions;
  return j.dump();
}

ConflictRecord conflict_record_from_json(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  ConflictRecord record;
  record.target_id = j.at("variant_id").get<std::string>();

  const nlohmann::json& gt = j.at("ground_truth");
  record.ground_truth.submitter_id = gt.at("submitter_hash").get<std::string>();
  record.ground_truth.category =
      category_from_string(gt.at("category").get<std::string>());
  record.ground_truth.classification =
      classification_from_string(gt.at("classification").get<std::string>());
  record.ground_truth.review_status = gt.at("review_status").get<std::string>();
  record.ground_truth.reputation = 1.0;
  record.ground_truth.confidence = 1.0;

  std::int64_t order = 0;
  for (const nlohmann::json& entry : j.at("submissions")) {
    Submission s;
    s.submitter_id = entry.at("submitter_hash").get<std::string>();
    s.category = category_from_string(entry.at("category").get<std::string>());
    s.classification =
        classification_from_string(entry.at("classification").get<std::string>());
    s.review_status = entry.at("review_status").get<std::string>();
    s.reputation = entry.at("R").get<double>();
    s.confidence = entry.at("conf").get<double>();
    s.order_index = order++;
    record.submissions.push_back(std::move(s));
  }
  record.bucket = classify_bucket(record.submissions);
  validate_conflict_record(record);
  return record;
}

void write_corpus_jsonl(const std::vector<ConflictRecord>& records, std::ostream& out) {
  for (const ConflictRecord& record : records) {
    out << conflict_record_to_json(record) << '\n';
  }
}

std::vector<ConflictRecord> read_corpus_jsonl(std::istream& in) {
  std::vector<ConflictRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      records.push_back(conflict_record_from_json(line));
    }
  }
  return records;
}

void write_corpus_file(const std::vector<ConflictRecord>& records,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open corpus file for writing: " + path);
  }
  write_corpus_jsonl(records, out);
}

std::vector<ConflictRecord> read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path);
  }
  return read_corpus_jsonl(in);
}

}  // namespace afdo
