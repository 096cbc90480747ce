#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "afdo/virtual_time.hpp"

namespace afdo {

// Simplified PROV-style provenance entry: what was evaluated or decided, the
// entities consumed and produced, and the acting object. One record per
// policy evaluation, trust update and consensus round.
struct AuditRecord {
  std::string activity;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string agent;  // acting object pid
  std::string policy_version;
  VirtualTime timestamp = 0;
};

// Append-only store. Records are never mutated or deleted; an id is the
// record's index at append time and stays valid for the log's lifetime.
class AuditLog {
 public:
  std::size_t append(AuditRecord record);

  const AuditRecord& at(std::size_t id) const { return records_.at(id); }
  std::size_t size() const { return records_.size(); }
  const std::vector<AuditRecord>& records() const { return records_; }

  // Line-delimited JSON export.
  void write_jsonl(std::ostream& out) const;

 private:
  std::vector<AuditRecord> records_;
};

}  // namespace afdo
