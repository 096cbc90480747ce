#include "afdo/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace afdo {

double classification_to_score(Classification c) {
  return static_cast<int>(c) * 0.25;
}

Classification score_to_classification(double score, MidpointTie tie) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("score outside [0,1]: " + std::to_string(score));
  }
  Classification best = Classification::Benign;
  double best_distance = 2.0;
  for (const Classification c : kAllClassifications) {
    const double distance = std::fabs(score - classification_to_score(c));
    const bool closer = distance < best_distance;
    // Scale values are ascending, so on an exact tie the earlier label is the
    // lower one; TowardHigher takes the later label instead.
    const bool tie_higher = tie == MidpointTie::TowardHigher && distance == best_distance;
    if (closer || tie_higher) {
      best = c;
      best_distance = distance;
    }
  }
  return best;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Benign: return "Benign";
    case Classification::LikelyBenign: return "Likely benign";
    case Classification::VUS: return "VUS";
    case Classification::LikelyPathogenic: return "Likely pathogenic";
    case Classification::Pathogenic: return "Pathogenic";
  }
  throw std::invalid_argument("unknown classification value");
}

Classification classification_from_string(std::string_view s) {
  if (s == "Benign") return Classification::Benign;
  if (s == "Likely benign" || s == "LikelyBenign") return Classification::LikelyBenign;
  if (s == "VUS" || s == "Uncertain significance") return Classification::VUS;
  if (s == "Likely pathogenic" || s == "LikelyPathogenic") {
    return Classification::LikelyPathogenic;
  }
  if (s == "Pathogenic") return Classification::Pathogenic;
  throw std::invalid_argument("unknown classification: " + std::string(s));
}

std::string to_string(SubmitterCategory c) {
  switch (c) {
    case SubmitterCategory::ClinicalLab: return "clinical_lab";
    case SubmitterCategory::ResearchLab: return "research_lab";
    case SubmitterCategory::Individual: return "individual";
    case SubmitterCategory::ExpertPanel: return "expert_panel";
  }
  throw std::invalid_argument("unknown submitter category value");
}

SubmitterCategory category_from_string(std::string_view s) {
  if (s == "clinical_lab") return SubmitterCategory::ClinicalLab;
  if (s == "research_lab") return SubmitterCategory::ResearchLab;
  if (s == "individual") return SubmitterCategory::Individual;
  if (s == "expert_panel") return SubmitterCategory::ExpertPanel;
  throw std::invalid_argument("unknown submitter category: " + std::string(s));
}

void validate_submission(const Submission& s) {
  if (s.submitter_id.empty()) {
    throw std::invalid_argument("submission has empty submitter_id");
  }
  if (!(s.reputation >= 0.0 && s.reputation <= 1.0)) {
    throw std::invalid_argument("reputation outside [0,1] for " + s.submitter_id);
  }
  if (!(s.confidence >= 0.0 && s.confidence <= 1.0)) {
    throw std::invalid_argument("confidence outside [0,1] for " + s.submitter_id);
  }
}

MajorGroup major_group(Classification c) {
  switch (c) {
    case Classification::Benign:
    case Classification::LikelyBenign:
      return MajorGroup::BenignSide;
    case Classification::VUS:
      return MajorGroup::Uncertain;
    case Classification::LikelyPathogenic:
    case Classification::Pathogenic:
      return MajorGroup::PathogenicSide;
  }
  throw std::invalid_argument("unknown classification value");
}

std::string to_string(DisagreementBucket b) {
  switch (b) {
    case DisagreementBucket::PlpVsVus: return "PLP_vs_VUS";
    case DisagreementBucket::VusVsLbb: return "VUS_vs_LBB";
    case DisagreementBucket::PlpVsLbb: return "PLP_vs_LBB";
    case DisagreementBucket::ThreeGroupSpan: return "three_group_span";
  }
  throw std::invalid_argument("unknown bucket value");
}

DisagreementBucket bucket_from_string(std::string_view s) {
  if (s == "PLP_vs_VUS") return DisagreementBucket::PlpVsVus;
  if (s == "VUS_vs_LBB") return DisagreementBucket::VusVsLbb;
  if (s == "PLP_vs_LBB") return DisagreementBucket::PlpVsLbb;
  if (s == "three_group_span") return DisagreementBucket::ThreeGroupSpan;
  throw std::invalid_argument("unknown bucket: " + std::string(s));
}

DisagreementBucket classify_bucket(std::span<const Submission> submissions) {
  bool benign = false;
  bool uncertain = false;
  bool pathogenic = false;
  for (const Submission& s : submissions) {
    switch (major_group(s.classification)) {
      case MajorGroup::BenignSide: benign = true; break;
      case MajorGroup::Uncertain: uncertain = true; break;
      case MajorGroup::PathogenicSide: pathogenic = true; break;
    }
  }
  const int groups = (benign ? 1 : 0) + (uncertain ? 1 : 0) + (pathogenic ? 1 : 0);
  if (groups < 2) {
    throw std::invalid_argument("submissions span a single major group: not a conflict");
  }
  if (groups == 3) return DisagreementBucket::ThreeGroupSpan;
  if (pathogenic && uncertain) return DisagreementBucket::PlpVsVus;
  if (uncertain && benign) return DisagreementBucket::VusVsLbb;
  return DisagreementBucket::PlpVsLbb;
}

void validate_conflict_record(const ConflictRecord& r) {
  if (r.target_id.empty()) {
    throw std::invalid_argument("conflict record has empty target_id");
  }
  if (r.ground_truth.category != SubmitterCategory::ExpertPanel) {
    throw std::invalid_argument("ground truth must be an expert panel: " + r.target_id);
  }
  validate_submission(r.ground_truth);
  std::set<std::string> submitters;
  for (const Submission& s : r.submissions) {
    validate_submission(s);
    if (s.category == SubmitterCategory::ExpertPanel) {
      throw std::invalid_argument("expert panel among consensus inputs: " + r.target_id);
    }
    if (s.submitter_id == r.ground_truth.submitter_id) {
      throw std::invalid_argument("ground truth repeated in submissions: " + r.target_id);
    }
    submitters.insert(s.submitter_id);
  }
  if (submitters.size() < 2) {
    throw std::invalid_argument("fewer than 2 distinct submitters: " + r.target_id);
  }
  if (classify_bucket(r.submissions) != r.bucket) {
    throw std::invalid_argument("bucket inconsistent with submissions: " + r.target_id);
  }
}

bool FDORecord::has_operation(std::string_view name) const {
  return std::find(operations.begin(), operations.end(), name) != operations.end();
}

void validate_fdo(const FDORecord& r) {
  if (r.pid.empty()) {
    throw std::invalid_argument("FDO record has empty pid");
  }
  if (r.fdo_type.empty()) {
    throw std::invalid_argument("FDO record has empty type: " + r.pid);
  }
  for (const std::string_view op : kMandatoryOperations) {
    if (!r.has_operation(op)) {
      throw std::invalid_argument("FDO record " + r.pid + " lacks mandatory operation " +
                                  std::string(op));
    }
  }
}

}  // namespace afdo
