#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "afdo/fields.hpp"
#include "afdo/policy.hpp"
#include "afdo/virtual_time.hpp"

namespace afdo {

// ---------------------------------------------------------------------------
// Event alphabet
// ---------------------------------------------------------------------------

enum class EventKind {
  Create,
  Update,
  Announce,
  Validate,
  Reconcile,
  TrustChange,
};

inline constexpr EventKind kAllEventKinds[] = {
    EventKind::Create,    EventKind::Update,    EventKind::Announce,
    EventKind::Validate,  EventKind::Reconcile, EventKind::TrustChange,
};

std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& text);

struct Event {
  EventKind kind = EventKind::Announce;
  std::string actor;  // publishing object's pid
  FieldMap payload;
  VirtualTime timestamp = 0;
  std::uint64_t sequence = 0;  // assigned by the bus on publish
};

// ActivityStreams-shaped JSON: type, actor, object, published.
std::string event_to_json(const Event& event);
Event event_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Subscriptions
// ---------------------------------------------------------------------------

// A filter is an optional kind constraint plus a conjunction of payload
// clauses, reusing the policy clause evaluator. An empty clause list is the
// wildcard.
struct SubscriptionFilter {
  std::optional<EventKind> kind;
  std::vector<ConditionClause> pattern;
};

struct Subscription {
  std::uint64_t id = 0;  // assigned by the bus, delivery order is FIFO by id
  std::string subscriber_pid;
  SubscriptionFilter filter;
  bool deliver_self = false;
};

bool filter_matches(const SubscriptionFilter& filter, const Event& event);

// ---------------------------------------------------------------------------
// Delivery log
// ---------------------------------------------------------------------------

// Deliveries are logged apart from the audit log so audit record counts keep
// tracking trust updates, policy evaluations and consensus rounds only.
struct DeliveryRecord {
  std::uint64_t event_sequence = 0;
  std::uint64_t subscription_id = 0;
  std::string subscriber_pid;
  EventKind kind = EventKind::Announce;
  VirtualTime timestamp = 0;
};

// ---------------------------------------------------------------------------
// Bus
// ---------------------------------------------------------------------------

class EventBus {
 public:
  std::uint64_t subscribe(std::string subscriber_pid, SubscriptionFilter filter,
                          bool deliver_self = false);
  bool unsubscribe(std::uint64_t subscription_id);

  // Matches the event against all subscriptions, collapses duplicates so a
  // subscriber pid sees the event at most once, and skips self-delivery
  // unless the matching subscription opts in. Returns deliveries in
  // subscription-id order.
  std::vector<DeliveryRecord> publish(Event event);

  const std::vector<DeliveryRecord>& deliveries() const { return deliveries_; }
  const std::vector<Event>& published() const { return published_; }
  std::size_t subscription_count() const { return subscriptions_.size(); }

 private:
  std::vector<Subscription> subscriptions_;
  std::vector<DeliveryRecord> deliveries_;
  std::vector<Event> published_;
  std::uint64_t next_subscription_id_ = 1;
  std::uint64_t next_sequence_ = 1;
};

// ---------------------------------------------------------------------------
// Handler map: event kind to policy indices
// ---------------------------------------------------------------------------

// H binds each event kind to the policies evaluated on receipt, by index
// into the owner's policy sequence. Indices stay sorted and unique; dispatch
// never prunes further on payload content.
class HandlerMap {
 public:
  void bind(EventKind kind, std::size_t policy_index);
  const std::vector<std::size_t>& handlers(EventKind kind) const;
  bool empty() const { return handlers_.empty(); }

 private:
  std::map<EventKind, std::vector<std::size_t>> handlers_;
  static const std::vector<std::size_t> kEmpty;
};

}  // namespace afdo
