#include "afdo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <variant>

#include "afdo/rng.hpp"

namespace afdo {

bool is_builtin_action(std::string_view action) {
  return action == "ANNOUNCE" || action == "VALIDATE" || action == "RECONCILE" ||
         action == "UPDATETRUST";
}

FieldMap ObjectNode::fields() const {
  FieldMap map;
  map.emplace("pid", name);
  map.emplace("type", type);
  for (const ObjectProperty& property : properties) {
    if (property.predicate.rfind("afdo:", 0) != 0 || property.values.empty()) {
      continue;
    }
    const std::string key = property.predicate.substr(5);
    if (map.count(key) != 0) {
      continue;  // first value wins
    }
    const ObjectTerm& term = property.values.front();
    if (term.kind == ObjectTerm::Kind::Number) {
      map.emplace(key, term.number);
    } else {
      map.emplace(key, term.text);
    }
  }
  return map;
}

ParseError::ParseError(std::string message, int line, int column)
    : std::runtime_error(std::move(message) + " (line " + std::to_string(line) +
                         ", column " + std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

std::optional<VirtualTime> DutyState::last_fired(const std::string& policy_id,
                                                 const std::string& pid) const {
  const auto it = last_.find({policy_id, pid});
  if (it == last_.end()) {
    return std::nullopt;
  }
  return it->second;
}

void DutyState::record_fire(const std::string& policy_id, const std::string& pid,
                            VirtualTime when) {
  last_[{policy_id, pid}] = when;
}

namespace {

struct ClauseResult {
  bool value = false;
  std::optional<std::string> error;
};

const FieldValue* lookup(const FieldMap& fields, const std::string& key) {
  const auto it = fields.find(key);
  return it == fields.end() ? nullptr : &it->second;
}

ClauseResult eval_clause(const ConditionClause& clause, const FieldMap& object_fields,
                         const FieldMap* payload, const EvalOptions& options) {
  const FieldValue* own = lookup(object_fields, clause.path);
  if (own == nullptr) {
    if (options.strict_fields) {
      return {false, "missing object field: " + clause.path};
    }
    return {false, std::nullopt};
  }

  bool compared = false;
  if (clause.kind == ConditionClause::Kind::Threshold) {
    compared = compare_fields(*own, clause.cmp, clause.constant);
  } else {
    if (payload == nullptr) {
      if (options.strict_fields) {
        return {false, "payload clause evaluated without an event"};
      }
      return {false, std::nullopt};
    }
    const FieldValue* announced = lookup(*payload, clause.payload_path);
    if (announced == nullptr) {
      if (options.strict_fields) {
        return {false, "missing payload field: " + clause.payload_path};
      }
      return {false, std::nullopt};
    }
    compared = compare_fields(*own, Comparator::Equal, *announced);
  }
  return {clause.negated ? !compared : compared, std::nullopt};
}

ClauseResult eval_condition(const Condition& condition, const FieldMap& object_fields,
                            const FieldMap* payload, const EvalOptions& options) {
  if (condition.target_kind == TargetKind::Node) {
    const FieldValue* pid = lookup(object_fields, "pid");
    if (pid == nullptr || !std::holds_alternative<std::string>(*pid) ||
        std::get<std::string>(*pid) != condition.target) {
      return {false, std::nullopt};
    }
  } else if (condition.target_kind == TargetKind::Class) {
    const FieldValue* type = lookup(object_fields, "type");
    if (type == nullptr || !std::holds_alternative<std::string>(*type) ||
        std::get<std::string>(*type) != condition.target) {
      return {false, std::nullopt};
    }
  }
  for (const ConditionClause& clause : condition.clauses) {
    const ClauseResult result = eval_clause(clause, object_fields, payload, options);
    if (result.error) {
      return result;
    }
    if (!result.value) {
      return {false, std::nullopt};
    }
  }
  return {true, std::nullopt};
}

std::string object_pid(const FieldMap& fields) {
  const FieldValue* pid = lookup(fields, "pid");
  if (pid != nullptr && std::holds_alternative<std::string>(*pid)) {
    return std::get<std::string>(*pid);
  }
  return "";
}

}  // namespace

PolicyEvaluation evaluate_policy(const Policy& policy, const FieldMap& object_fields,
                                 const FieldMap* event_payload, VirtualTime clock,
                                 DutyState& duties, AuditLog& log,
                                 const EvalOptions& options) {
  PolicyEvaluation eval;
  eval.policy_version = policy.effective_version();

  const ClauseResult condition =
      eval_condition(policy.condition, object_fields, event_payload, options);
  eval.condition_result = condition.value;
  eval.error = condition.error;

  const std::string pid = object_pid(object_fields);

  std::vector<std::string> notify_targets;
  if (eval.condition_result && !eval.error) {
    bool blocked = false;
    for (const Obligation& duty : policy.obligations) {
      if (duty.kind == Obligation::Kind::RateLimit) {
        const std::optional<VirtualTime> last = duties.last_fired(policy.id, pid);
        if (last && clock - *last < duty.window.count()) {
          eval.blocked_by = "rate_limit";
          blocked = true;
          break;
        }
      } else {
        notify_targets.push_back(duty.assignee);
      }
    }
    eval.fired = !blocked;
  }

  if (eval.fired) {
    // The window slot is consumed only by an actual firing.
    duties.record_fire(policy.id, pid, clock);
  }

  AuditRecord record;
  record.activity = policy.audit_template.activity;
  record.inputs = {"policy=" + policy.id,
                   "condition=" + std::string(eval.condition_result ? "true" : "false")};
  if (event_payload != nullptr) {
    record.inputs.push_back("event_payload=present");
  }
  if (eval.error) {
    record.outputs.push_back("error=" + *eval.error);
  } else if (eval.fired) {
    record.outputs.push_back("action=" + policy.action);
    for (const std::string& target : notify_targets) {
      record.outputs.push_back("notify=" + target);
    }
  } else if (eval.blocked_by) {
    record.outputs.push_back("blocked=" + *eval.blocked_by);
  } else {
    record.outputs.push_back("no_fire");
  }
  record.agent = pid;
  record.policy_version = eval.policy_version;
  record.timestamp = clock;
  eval.audit_record_id = log.append(record);

  return eval;
}

// ---------------------------------------------------------------------------
// Behavioural-equivalence battery
// ---------------------------------------------------------------------------

namespace {

// Values probing one threshold clause: the constant itself, both sides of
// it, and a couple of randomised points.
std::vector<double> probe_values(double constant, Rng& rng) {
  const double eps = std::max(1e-6, std::fabs(constant) * 1e-6);
  return {constant, constant - eps, constant + eps, constant - rng.uniform(),
          constant + rng.uniform()};
}

}  // namespace

std::vector<EvalInput> build_eval_battery(const Policy& policy, std::size_t count,
                                          std::uint64_t seed) {
  Rng rng(derive_seed(seed, "eval-battery"));

  // A payload template seeded from the clause paths, mutated per input.
  std::vector<EvalInput> battery;
  const bool has_rate_limit =
      std::any_of(policy.obligations.begin(), policy.obligations.end(),
                  [](const Obligation& o) { return o.kind == Obligation::Kind::RateLimit; });
  VirtualTime window = 86'400'000;
  for (const Obligation& duty : policy.obligations) {
    if (duty.kind == Obligation::Kind::RateLimit) {
      window = duty.window.count();
    }
  }

  for (std::size_t i = 0; i < count; ++i) {
    EvalInput input;
    // Half the battery honours the target restriction, half misses it.
    const bool on_target = i % 2 == 0;
    if (policy.condition.target_kind == TargetKind::Node) {
      input.object_fields["pid"] = on_target ? policy.condition.target : "other-node";
      input.object_fields["type"] = std::string("GenericObject");
    } else if (policy.condition.target_kind == TargetKind::Class) {
      input.object_fields["pid"] = "battery-" + std::to_string(i);
      input.object_fields["type"] =
          on_target ? policy.condition.target : std::string("OtherClass");
    } else {
      input.object_fields["pid"] = "battery-" + std::to_string(i);
      input.object_fields["type"] = std::string("GenericObject");
    }

    bool wants_payload = false;
    for (const ConditionClause& clause : policy.condition.clauses) {
      if (clause.kind == ConditionClause::Kind::Threshold) {
        const std::optional<double> constant = field_as_number(clause.constant);
        if (constant) {
          const std::vector<double> probes = probe_values(*constant, rng);
          input.object_fields[clause.path] = probes[i % probes.size()];
        } else {
          // Non-numeric constant: alternate exact match and mismatch.
          const std::string text = std::get<std::string>(clause.constant);
          input.object_fields[clause.path] =
              i % 3 == 0 ? text : text + "-x" + std::to_string(i % 5);
        }
        // Every few inputs drop the field entirely to probe the
        // missing-field rule.
        if (i % 7 == 3) {
          input.object_fields.erase(clause.path);
        }
      } else {
        wants_payload = true;
        const std::string value = "value-" + std::to_string(rng.uniform_int(4));
        input.object_fields[clause.path] = value;
        if (!input.payload) {
          input.payload = FieldMap{};
        }
        // Alternate equal / different / missing payload field.
        if (i % 3 == 0) {
          (*input.payload)[clause.payload_path] = value;
        } else if (i % 3 == 1) {
          (*input.payload)[clause.payload_path] = value + "-diff";
        }
      }
    }
    if (wants_payload && !input.payload) {
      input.payload = FieldMap{};
    }

    // Clock steps at half the duty window so rate-limit state transitions
    // are exercised; without a rate limit a plain increasing clock suffices.
    input.clock = has_rate_limit ? static_cast<VirtualTime>(i) * (window / 2)
                                 : static_cast<VirtualTime>(i) * 1000;
    battery.push_back(std::move(input));
  }
  return battery;
}

bool behaviourally_equivalent(const Policy& a, const Policy& b,
                              std::span<const EvalInput> battery,
                              const EvalOptions& options) {
  DutyState duties_a;
  DutyState duties_b;
  AuditLog log_a;
  AuditLog log_b;
  for (const EvalInput& input : battery) {
    const FieldMap* payload = input.payload ? &*input.payload : nullptr;
    const PolicyEvaluation ea = evaluate_policy(a, input.object_fields, payload,
                                                input.clock, duties_a, log_a, options);
    const PolicyEvaluation eb = evaluate_policy(b, input.object_fields, payload,
                                                input.clock, duties_b, log_b, options);
    if (ea.condition_result != eb.condition_result || ea.fired != eb.fired ||
        ea.blocked_by != eb.blocked_by || ea.error.has_value() != eb.error.has_value()) {
      return false;
    }
  }
  return true;
}

}  // namespace afdo
