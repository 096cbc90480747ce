#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "afdo/afdo_record.hpp"
#include "afdo/audit.hpp"
#include "afdo/events.hpp"

using afdo::Event;
using afdo::EventKind;

namespace {

Event announce(std::string actor, double score, afdo::VirtualTime at = 0) {
  Event e;
  e.kind = EventKind::Announce;
  e.actor = std::move(actor);
  e.payload["classificationScore"] = score;
  e.payload["variantId"] = std::string("BRCA1-c.68_69delAG");
  e.timestamp = at;
  return e;
}

afdo::ConditionClause score_at_least(double threshold) {
  afdo::ConditionClause clause;
  clause.kind = afdo::ConditionClause::Kind::Threshold;
  clause.path = "classificationScore";
  clause.cmp = afdo::Comparator::GreaterEqual;
  clause.constant = afdo::FieldValue{threshold};
  return clause;
}

// Minimal registrable object: mandatory operations, an always-true policy
// bound to Announce, and one Announce subscription.
afdo::AFDORecord make_object(std::string pid, bool subscribe_announce = true) {
  afdo::AFDORecord record;
  record.fdo.pid = std::move(pid);
  record.fdo.fdo_type = "GeneticVariantInterpretation";
  record.fdo.operations = {"Create", "Retrieve", "Update", "Delete"};

  afdo::Policy policy;
  policy.id = record.fdo.pid + "-policy";
  policy.action = "VALIDATE";
  record.policies.push_back(policy);
  record.event_interface.handlers.bind(EventKind::Announce, 0);
  if (subscribe_announce) {
    afdo::SubscriptionFilter filter;
    filter.kind = EventKind::Announce;
    record.event_interface.filters.push_back(filter);
  }
  return record;
}

}  // namespace

TEST_CASE("event kind names round-trip") {
  for (auto kind : afdo::kAllEventKinds) {
    CHECK(afdo::event_kind_from_string(afdo::to_string(kind)) == kind);
  }
  CHECK(afdo::to_string(EventKind::Announce) == "Announce");
  CHECK_THROWS(afdo::event_kind_from_string("Shout"));
}

TEST_CASE("activity-stream json round-trips the payload") {
  Event e = announce("obs-042", 0.75, 1234);
  e.sequence = 9;
  std::string json = afdo::event_to_json(e);
  CHECK(json.find("\"type\"") != std::string::npos);
  CHECK(json.find("\"actor\"") != std::string::npos);
  CHECK(json.find("\"object\"") != std::string::npos);
  CHECK(json.find("\"published\"") != std::string::npos);
  Event back = afdo::event_from_json(json);
  CHECK(back.kind == e.kind);
  CHECK(back.actor == e.actor);
  CHECK(back.timestamp == e.timestamp);
  CHECK(std::get<double>(back.payload.at("classificationScore")) == 0.75);
  CHECK(std::get<std::string>(back.payload.at("variantId")) == "BRCA1-c.68_69delAG");
}

TEST_CASE("filters match on kind and payload pattern") {
  afdo::SubscriptionFilter wildcard;
  CHECK(afdo::filter_matches(wildcard, announce("a", 0.1)));

  afdo::SubscriptionFilter by_kind;
  by_kind.kind = EventKind::Validate;
  CHECK_FALSE(afdo::filter_matches(by_kind, announce("a", 0.1)));
  by_kind.kind = EventKind::Announce;
  CHECK(afdo::filter_matches(by_kind, announce("a", 0.1)));

  afdo::SubscriptionFilter by_pattern;
  by_pattern.kind = EventKind::Announce;
  by_pattern.pattern.push_back(score_at_least(0.5));
  CHECK(afdo::filter_matches(by_pattern, announce("a", 0.75)));
  CHECK(afdo::filter_matches(by_pattern, announce("a", 0.5)));
  CHECK_FALSE(afdo::filter_matches(by_pattern, announce("a", 0.49)));

  // Missing payload field makes the pattern false, mirroring clause rules.
  afdo::SubscriptionFilter odd_field;
  odd_field.pattern.push_back(score_at_least(0.5));
  odd_field.pattern[0].path = "absentField";
  CHECK_FALSE(afdo::filter_matches(odd_field, announce("a", 0.9)));
}

TEST_CASE("bus delivers exactly once per subscriber in subscription order") {
  afdo::EventBus bus;
  afdo::SubscriptionFilter any_announce;
  any_announce.kind = EventKind::Announce;
  afdo::SubscriptionFilter high_score;
  high_score.kind = EventKind::Announce;
  high_score.pattern.push_back(score_at_least(0.5));

  auto id_b = bus.subscribe("node-b", any_announce);
  auto id_a1 = bus.subscribe("node-a", any_announce);
  auto id_a2 = bus.subscribe("node-a", high_score);  // overlaps id_a1
  CHECK(bus.subscription_count() == 3);
  CHECK(id_b < id_a1);
  CHECK(id_a1 < id_a2);

  auto deliveries = bus.publish(announce("node-c", 0.9));
  // node-a matches twice but is delivered once, via its earliest match.
  REQUIRE(deliveries.size() == 2);
  CHECK(deliveries[0].subscriber_pid == "node-b");
  CHECK(deliveries[0].subscription_id == id_b);
  CHECK(deliveries[1].subscriber_pid == "node-a");
  CHECK(deliveries[1].subscription_id == id_a1);
  CHECK(deliveries[0].event_sequence == deliveries[1].event_sequence);

  // The shared log keeps every delivery.
  CHECK(bus.deliveries().size() == 2);
  CHECK(bus.published().size() == 1);
  CHECK(bus.published()[0].sequence == deliveries[0].event_sequence);
}

TEST_CASE("self-delivery is suppressed unless opted in") {
  afdo::EventBus bus;
  afdo::SubscriptionFilter any;
  bus.subscribe("node-a", any);
  CHECK(bus.publish(announce("node-a", 0.9)).empty());

  afdo::EventBus opt_in_bus;
  opt_in_bus.subscribe("node-a", any, true);
  CHECK(opt_in_bus.publish(announce("node-a", 0.9)).size() == 1);
}

TEST_CASE("unsubscribe stops future deliveries") {
  afdo::EventBus bus;
  afdo::SubscriptionFilter any;
  auto id = bus.subscribe("node-a", any);
  CHECK(bus.publish(announce("node-b", 0.5)).size() == 1);
  CHECK(bus.unsubscribe(id));
  CHECK_FALSE(bus.unsubscribe(id));
  CHECK(bus.publish(announce("node-b", 0.5)).empty());
}

TEST_CASE("sequences increase monotonically across publishes") {
  afdo::EventBus bus;
  afdo::SubscriptionFilter any;
  bus.subscribe("node-a", any);
  auto first = bus.publish(announce("node-b", 0.1));
  auto second = bus.publish(announce("node-b", 0.2));
  REQUIRE(first.size() == 1);
  REQUIRE(second.size() == 1);
  CHECK(second[0].event_sequence > first[0].event_sequence);
}

TEST_CASE("handler map keeps indices sorted and unique") {
  afdo::HandlerMap handlers;
  CHECK(handlers.empty());
  handlers.bind(EventKind::Announce, 2);
  handlers.bind(EventKind::Announce, 0);
  handlers.bind(EventKind::Announce, 2);  // duplicate
  handlers.bind(EventKind::Validate, 1);
  CHECK(handlers.handlers(EventKind::Announce) == std::vector<std::size_t>{0, 2});
  CHECK(handlers.handlers(EventKind::Validate) == std::vector<std::size_t>{1});
  CHECK(handlers.handlers(EventKind::Reconcile).empty());
  CHECK_FALSE(handlers.empty());
}

TEST_CASE("dispatch evaluates only the policies bound to the event kind") {
  auto record = make_object("obs-001");
  // Second policy bound to Validate only.
  afdo::Policy validate_policy;
  validate_policy.id = "obs-001-validate";
  validate_policy.action = "RECONCILE";
  record.policies.push_back(validate_policy);
  record.event_interface.handlers.bind(EventKind::Validate, 1);
  CHECK_NOTHROW(afdo::validate_afdo(record));

  afdo::DutyState duties;
  afdo::AuditLog log;
  auto evals = afdo::dispatch_to_policies(record, announce("peer", 0.9), duties, log);
  CHECK(evals.size() == 1);
  CHECK(log.size() == 1);

  Event validate = announce("peer", 0.9);
  validate.kind = EventKind::Validate;
  evals = afdo::dispatch_to_policies(record, validate, duties, log);
  CHECK(evals.size() == 1);
  CHECK(log.at(1).policy_version == "obs-001-validate");

  Event reconcile = announce("peer", 0.9);
  reconcile.kind = EventKind::Reconcile;
  CHECK(afdo::dispatch_to_policies(record, reconcile, duties, log).empty());
  CHECK(log.size() == 2);
}

TEST_CASE("afdo validation enforces the action closure") {
  auto record = make_object("obs-002");
  record.policies[0].action = "negotiateClassification";  // not declared, not builtin
  CHECK_THROWS_AS(afdo::validate_afdo(record), std::invalid_argument);
  record.fdo.operations.push_back("negotiateClassification");
  CHECK_NOTHROW(afdo::validate_afdo(record));

  record.event_interface.handlers.bind(EventKind::Update, 5);  // no such policy
  CHECK_THROWS_AS(afdo::validate_afdo(record), std::invalid_argument);
}

TEST_CASE("community delivers and dispatches per subscriber") {
  afdo::AuditLog log;
  afdo::Community community(log);
  community.add_object(make_object("obs-a"));
  community.add_object(make_object("obs-b"));
  community.add_object(make_object("obs-c", false));  // registered, not subscribed
  CHECK(community.size() == 3);
  CHECK_THROWS_AS(community.add_object(make_object("obs-a")), std::invalid_argument);

  auto report = community.publish(announce("obs-a", 0.8));
  // obs-a is the publisher (self-delivery off), obs-c never subscribed.
  CHECK(report.matched_subscriptions == 1);
  REQUIRE(report.evaluations_per_subscriber.size() == 1);
  CHECK(report.evaluations_per_subscriber[0].first == "obs-b");
  CHECK(report.evaluations_per_subscriber[0].second == 1);
  CHECK(report.total_evaluations == 1);
  CHECK(log.size() == 1);  // one policy evaluation, delivery log kept apart
  CHECK(community.bus().deliveries().size() == 1);
}

TEST_CASE("dispatch work per announcement is set by subscriptions, not community size") {
  // Same fixed subscription set inside communities of 100 and 1000 objects:
  // the per-announcement evaluation count must be identical.
  auto build = [](std::size_t population) {
    afdo::AuditLog log;
    afdo::Community community(log);
    for (std::size_t i = 0; i < population; ++i) {
      // Only the first 10 objects subscribe; the rest are passive.
      community.add_object(make_object("obs-" + std::to_string(i), i < 10));
    }
    auto report = community.publish(announce("external-publisher", 0.9));
    return report.total_evaluations;
  };
  auto small = build(100);
  auto large = build(1000);
  CHECK(small == 10);
  CHECK(large == 10);
  CHECK(small == large);
}
