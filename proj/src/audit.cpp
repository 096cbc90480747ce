#include "afdo/audit.hpp"

#include <json.hpp>

#include <ostream>
#include <utility>

namespace afdo {

std::size_t AuditLog::append(AuditRecord record) {
  records_.push_back(std::move(record));
  return records_.size() - 1;
}

void AuditLog::write_jsonl(std::ostream& out) const {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const AuditRecord& r = records_[i];
    nlohmann::ordered_json line;
    line["id"] = i;
    line["activity"] = r.activity;
    line["inputs"] = r.inputs;
    line["outputs"] = r.outputs;
    line["agent"] = r.agent;
    line["policy_version"] = r.policy_version;
    line["timestamp"] = r.timestamp;
    out << line.dump() << '\n';
  }
}

}  // namespace afdo
