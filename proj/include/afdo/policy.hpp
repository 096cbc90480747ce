#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "afdo/audit.hpp"
#include "afdo/fields.hpp"
#include "afdo/virtual_time.hpp"

namespace afdo {

// ---------------------------------------------------------------------------
// Policy model: condition, action, obligations, audit template
// ---------------------------------------------------------------------------

// One conjunct of a condition. Threshold clauses compare an object field
// against a constant; payload clauses compare an object field against a field
// of the triggering announcement. Negation wraps the comparison only: a
// missing field makes the whole clause false either way, so evaluation stays
// total over heterogeneous objects.
struct ConditionClause {
  enum class Kind { Threshold, PayloadEquals };

  Kind kind = Kind::Threshold;
  bool negated = false;
  std::string path;               // object field name
  Comparator cmp = Comparator::LessEqual;
  FieldValue constant;            // Threshold only
  bool constant_is_name = false;  // textual constant was a prefixed name
  std::string payload_path;       // PayloadEquals only
};

enum class TargetKind { None, Node, Class };

// Conjunction of clauses with an optional target restriction: a node target
// must equal the object's pid, a class target its type.
struct Condition {
  TargetKind target_kind = TargetKind::None;
  std::string target;
  std::vector<ConditionClause> clauses;
};

struct Obligation {
  enum class Kind { RateLimit, Notify };

  Kind kind = Kind::RateLimit;
  DurationMs window{0};   // RateLimit: > 0
  std::string assignee;   // Notify
};

// Skeleton for the audit record each evaluation emits.
struct AuditTemplate {
  std::string activity = "policy_evaluation";
};

struct Policy {
  std::string id;       // policy node name, e.g. "obs042-policy"
  std::string version;  // defaults to id when not set explicitly
  Condition condition;
  std::string action;
  std::vector<Obligation> obligations;
  AuditTemplate audit_template;

  const std::string& effective_version() const { return version.empty() ? id : version; }
};

// Actions every aFDO accepts in addition to its declared operations.
bool is_builtin_action(std::string_view action);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct PolicyEvaluation {
  std::string policy_version;
  bool condition_result = false;
  bool fired = false;
  std::optional<std::string> blocked_by;  // obligation that denied the firing
  std::optional<std::string> error;       // malformed path / strict-mode miss
  std::size_t audit_record_id = 0;
};

// Rate-limit windows per (policy id, object pid). A slot is consumed only on
// an actual firing, never on a mere evaluation.
class DutyState {
 public:
  std::optional<VirtualTime> last_fired(const std::string& policy_id,
                                        const std::string& pid) const;
  void record_fire(const std::string& policy_id, const std::string& pid, VirtualTime when);

 private:
  std::map<std::pair<std::string, std::string>, VirtualTime> last_;
};

struct EvalOptions {
  // Strict mode turns a missing field into an evaluation error instead of a
  // false clause.
  bool strict_fields = false;
};

// Evaluates condition and obligations and always emits exactly one audit
// record, on every path: fire, no-fire, blocked and error. Target checks
// read the reserved object field keys "pid" and "type".
PolicyEvaluation evaluate_policy(const Policy& policy, const FieldMap& object_fields,
                                 const FieldMap* event_payload, VirtualTime clock,
                                 DutyState& duties, AuditLog& log,
                                 const EvalOptions& options = {});

// ---------------------------------------------------------------------------
// Turtle-subset text form
// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// RDF-star quoted-triple annotation, preserved opaquely.
struct Annotation {
  std::string subject;
  std::string subject_predicate;
  std::string subject_object;
  std::string predicate;
  std::string object;
};

// One RDF object term, with the lexical slot needed for byte-stable
// round-trips of IRIs and typed literals.
struct ObjectTerm {
  enum class Kind { Name, Number, String };

  Kind kind = Kind::Name;
  std::string text;      // prefixed name, or string literal body
  double number = 0.0;   // Number only
  std::string datatype;  // String only, optional ^^ type as written
};

// A non-policy subject in a policy document: the described object itself.
// Properties keep declaration order and multi-valued objects.
struct ObjectProperty {
  std::string predicate;  // prefixed name as written
  std::vector<ObjectTerm> values;
};

struct ObjectNode {
  std::string name;  // local name, default prefix stripped
  std::string type;  // local name of the afdo: type
  std::vector<ObjectProperty> properties;

  // Evaluation view: afdo:-prefixed predicates keyed by local name, first
  // value wins, numbers as doubles, everything else as text.
  FieldMap fields() const;
};

struct PolicyDocument {
  std::map<std::string, std::string> prefixes;
  std::vector<ObjectNode> objects;
  std::vector<Annotation> annotations;
  std::vector<Policy> policies;
};

// Parses the SHACL+ODRL Turtle subset (prefixes, node shapes with
// threshold / equals / not clauses, rate-limit and notify duties, quoted
// triples). Anything outside the subset is a ParseError with position.
PolicyDocument parse_policy_document(const std::string& text);

// First policy of the document; errors when none is present.
Policy parse_policy(const std::string& text);

// Canonical serialisation: fixed prefix block, object nodes, annotations,
// then policies with clause order condition / action / duties. Byte
// deterministic; serialise(parse(serialise(x))) == serialise(x).
std::string serialise_policy_document(const PolicyDocument& doc);
std::string serialise_policy(const Policy& policy);

// Behavioural-equivalence battery: deterministic evaluation inputs probing
// each clause around its threshold, target hits and misses, payload matches
// and mismatches, and duty windows.
struct EvalInput {
  FieldMap object_fields;
  std::optional<FieldMap> payload;
  VirtualTime clock = 0;
};

std::vector<EvalInput> build_eval_battery(const Policy& policy, std::size_t count,
                                          std::uint64_t seed);

// True when the two policies produce identical evaluations on every input.
bool behaviourally_equivalent(const Policy& a, const Policy& b,
                              std::span<const EvalInput> battery);

}  // namespace afdo
