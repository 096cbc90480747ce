#include "afdo/events.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>

namespace afdo {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Create: return "Create";
    case EventKind::Update: return "Update";
    case EventKind::Announce: return "Announce";
    case EventKind::Validate: return "Validate";
    case EventKind::Reconcile: return "Reconcile";
    case EventKind::TrustChange: return "TrustChange";
  }
  throw std::invalid_argument("unknown event kind value");
}

EventKind event_kind_from_string(const std::string& text) {
  for (const EventKind kind : kAllEventKinds) {
    if (to_string(kind) == text) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown event kind: " + text);
}

std::string event_to_json(const Event& event) {
  nlohmann::ordered_json j;
  j["type"] = to_string(event.kind);
  j["actor"] = event.actor;
  nlohmann::ordered_json object;
  for (const auto& [key, value] : event.payload) {
    if (const double* number = std::get_if<double>(&value)) {
      object[key] = *number;
    } else {
      object[key] = std::get<std::string>(value);
    }
  }
  j["object"] = object;
  j["published"] = event.timestamp;
  return j.dump();
}

Event event_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Event event;
  event.kind = event_kind_from_string(j.at("type").get<std::string>());
  event.actor = j.at("actor").get<std::string>();
  for (const auto& [key, value] : j.at("object").items()) {
    if (value.is_number()) {
      event.payload[key] = value.get<double>();
    } else if (value.is_string()) {
      event.payload[key] = value.get<std::string>();
    } else {
      throw std::invalid_argument("unsupported payload value for field: " + key);
    }
  }
  event.timestamp = j.at("published").get<VirtualTime>();
  return event;
}

bool filter_matches(const SubscriptionFilter& filter, const Event& event) {
  if (filter.kind && *filter.kind != event.kind) {
    return false;
  }
  for (const ConditionClause& clause : filter.pattern) {
    if (clause.kind != ConditionClause::Kind::Threshold) {
      throw std::invalid_argument("subscription filters use threshold clauses only");
    }
    const auto it = event.payload.find(clause.path);
    if (it == event.payload.end()) {
      return false;  // missing field never matches, negated or not
    }
    const bool compared = compare_fields(it->second, clause.cmp, clause.constant);
    if (clause.negated ? compared : !compared) {
      return false;
    }
  }
  return true;
}

std::uint64_t EventBus::subscribe(std::string subscriber_pid, SubscriptionFilter filter,
                                  bool deliver_self) {
  Subscription subscription;
  subscription.id = next_subscription_id_++;
  subscription.subscriber_pid = std::move(subscriber_pid);
  subscription.filter = std::move(filter);
  subscription.deliver_self = deliver_self;
  subscriptions_.push_back(std::move(subscription));
  return subscriptions_.back().id;
}

bool EventBus::unsubscribe(std::uint64_t subscription_id) {
  const auto it = std::find_if(
      subscriptions_.begin(), subscriptions_.end(),
      [subscription_id](const Subscription& s) { return s.id == subscription_id; });
  if (it == subscriptions_.end()) {
    return false;
  }
  subscriptions_.erase(it);
  return true;
}

std::vector<DeliveryRecord> EventBus::publish(Event event) {
  event.sequence = next_sequence_++;
  published_.push_back(event);

  // Subscriptions are held in id order, so the scan is already FIFO per
  // subscriber; the set collapses duplicate matches to exactly-once.
  std::vector<DeliveryRecord> made;
  std::set<std::string> delivered_to;
  for (const Subscription& subscription : subscriptions_) {
    if (subscription.subscriber_pid == event.actor && !subscription.deliver_self) {
      continue;
    }
    if (!filter_matches(subscription.filter, event)) {
      continue;
    }
    if (!delivered_to.insert(subscription.subscriber_pid).second) {
      continue;
    }
    DeliveryRecord record;
    record.event_sequence = event.sequence;
    record.subscription_id = subscription.id;
    record.subscriber_pid = subscription.subscriber_pid;
    record.kind = event.kind;
    record.timestamp = event.timestamp;
    made.push_back(record);
  }
  deliveries_.insert(deliveries_.end(), made.begin(), made.end());
  return made;
}

const std::vector<std::size_t> HandlerMap::kEmpty;

void HandlerMap::bind(EventKind kind, std::size_t policy_index) {
  std::vector<std::size_t>& indices = handlers_[kind];
  const auto it = std::lower_bound(indices.begin(), indices.end(), policy_index);
  if (it == indices.end() || *it != policy_index) {
    indices.insert(it, policy_index);
  }
}

const std::vector<std::size_t>& HandlerMap::handlers(EventKind kind) const {
  const auto it = handlers_.find(kind);
  return it == handlers_.end() ? kEmpty : it->second;
}

}  // namespace afdo
