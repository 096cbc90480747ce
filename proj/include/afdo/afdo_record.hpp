#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "afdo/audit.hpp"
#include "afdo/consensus.hpp"
#include "afdo/core_model.hpp"
#include "afdo/events.hpp"
#include "afdo/policy.hpp"
#include "afdo/trust.hpp"

namespace afdo {

// ---------------------------------------------------------------------------
// Autonomous extension of the FDO record
// ---------------------------------------------------------------------------

// Event interface: the fixed alphabet is EventKind; this carries the object's
// own subscription filters and its handler map.
struct EventInterface {
  std::vector<SubscriptionFilter> filters;
  HandlerMap handlers;
};

// Communication interface: peer-facing operations plus the agreement
// protocol configuration.
struct CommunicationInterface {
  std::vector<std::string> peer_operations;
  ConsensusConfig protocol;
};

struct AFDORecord {
  FDORecord fdo;
  std::vector<Policy> policies;
  EventInterface event_interface;
  CommunicationInterface comm_interface;
  TrustState trust;

  const std::string& pid() const { return fdo.pid; }
};

// Actions accepted regardless of the declared operation set.
inline constexpr std::string_view kBuiltinActions[] = {
    "ANNOUNCE", "VALIDATE", "RECONCILE", "UPDATETRUST"};

// Checks the embedded FDO plus the action closure: every policy action must
// be a declared operation or a builtin.
void validate_afdo(const AFDORecord& record);

// Evaluates exactly the policies listed in the handler map for event.kind,
// in declaration order, against the object's metadata with the event payload
// bound.
std::vector<PolicyEvaluation> dispatch_to_policies(const AFDORecord& receiver,
                                                   const Event& event, DutyState& duties,
                                                   AuditLog& log,
                                                   const EvalOptions& options = {});

// ---------------------------------------------------------------------------
// Community: a registry of objects wired onto one bus
// ---------------------------------------------------------------------------

struct DeliveryReport {
  std::size_t matched_subscriptions = 0;
  // Per subscriber pid, policy evaluations run for this event, in
  // subscription-id delivery order.
  std::vector<std::pair<std::string, std::size_t>> evaluations_per_subscriber;
  std::size_t total_evaluations = 0;
};

class Community {
 public:
  explicit Community(AuditLog& log) : log_(&log) {}

  // Registers the object and installs its subscription filters on the bus.
  void add_object(AFDORecord record);

  AFDORecord& object(const std::string& pid);
  const AFDORecord& object(const std::string& pid) const;
  std::size_t size() const { return objects_.size(); }

  // Publishes the event, delivers it per the bus rules, and dispatches each
  // delivery through the receiver's handler map.
  DeliveryReport publish(Event event, const EvalOptions& options = {});

  EventBus& bus() { return bus_; }
  DutyState& duties() { return duties_; }

 private:
  std::vector<AFDORecord> objects_;
  std::map<std::string, std::size_t> index_;  // pid to position in objects_
  EventBus bus_;
  DutyState duties_;
  AuditLog* log_;
};

}  // namespace afdo
