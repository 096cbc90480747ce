#include "afdo/afdo_record.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace afdo {

void validate_afdo(const AFDORecord& record) {
  validate_fdo(record.fdo);
  for (const Policy& policy : record.policies) {
    const bool builtin =
        std::find(std::begin(kBuiltinActions), std::end(kBuiltinActions),
                  policy.action) != std::end(kBuiltinActions);
    if (!builtin && !record.fdo.has_operation(policy.action)) {
      throw std::invalid_argument("policy " + policy.id + " action '" + policy.action +
                                  "' is neither an operation of " + record.fdo.pid +
                                  " nor a builtin");
    }
  }
  for (const EventKind kind : kAllEventKinds) {
    for (const std::size_t index : record.event_interface.handlers.handlers(kind)) {
      if (index >= record.policies.size()) {
        throw std::invalid_argument("handler map of " + record.fdo.pid +
                                    " references missing policy index " +
                                    std::to_string(index));
      }
    }
  }
}

namespace {

FieldMap object_fields(const AFDORecord& record) {
  FieldMap fields;
  fields.emplace("pid", record.fdo.pid);
  fields.emplace("type", record.fdo.fdo_type);
  fields.emplace("trustScore", record.trust.score);
  for (const auto& [key, value] : record.fdo.metadata) {
    fields.emplace(key, value);
  }
  return fields;
}

}  // namespace

std::vector<PolicyEvaluation> dispatch_to_policies(const AFDORecord& receiver,
                                                   const Event& event, DutyState& duties,
                                                   AuditLog& log,
                                                   const EvalOptions& options) {
  const FieldMap fields = object_fields(receiver);
  std::vector<PolicyEvaluation> evaluations;
  for (const std::size_t index :
       receiver.event_interface.handlers.handlers(event.kind)) {
    evaluations.push_back(evaluate_policy(receiver.policies.at(index), fields,
                                          &event.payload, event.timestamp, duties, log,
                                          options));
  }
  return evaluations;
}

void Community::add_object(AFDORecord record) {
  validate_afdo(record);
  if (index_.count(record.fdo.pid) != 0) {
    throw std::invalid_argument("duplicate pid: " + record.fdo.pid);
  }
  const std::size_t position = objects_.size();
  for (const SubscriptionFilter& filter : record.event_interface.filters) {
    bus_.subscribe(record.fdo.pid, filter);
  }
  index_.emplace(record.fdo.pid, position);
  objects_.push_back(std::move(record));
}

AFDORecord& Community::object(const std::string& pid) {
  const auto it = index_.find(pid);
  if (it == index_.end()) {
    throw std::out_of_range("unknown pid: " + pid);
  }
  return objects_[it->second];
}

const AFDORecord& Community::object(const std::string& pid) const {
  const auto it = index_.find(pid);
  if (it == index_.end()) {
    throw std::out_of_range("unknown pid: " + pid);
  }
  return objects_[it->second];
}

DeliveryReport Community::publish(Event event, const EvalOptions& options) {
  DeliveryReport report;
  const std::vector<DeliveryRecord> deliveries = bus_.publish(std::move(event));
  const Event& published = bus_.published().back();
  report.matched_subscriptions = deliveries.size();
  for (const DeliveryRecord& delivery : deliveries) {
    const AFDORecord& receiver = object(delivery.subscriber_pid);
    const std::vector<PolicyEvaluation> evaluations =
        dispatch_to_policies(receiver, published, duties_, *log_, options);
    report.evaluations_per_subscriber.emplace_back(delivery.subscriber_pid,
                                                   evaluations.size());
    report.total_evaluations += evaluations.size();
  }
  return report;
}

}  // namespace afdo
