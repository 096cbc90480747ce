#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "afdo/adversary.hpp"
#include "afdo/cli.hpp"
#include "afdo/consensus.hpp"
#include "afdo/core_model.hpp"
#include "afdo/corpus.hpp"
#include "afdo/hash.hpp"
#include "afdo/policy.hpp"
#include "afdo/rng.hpp"
#include "afdo/trust.hpp"

namespace py = pybind11;

namespace {

afdo::FieldMap to_field_map(const py::dict& d) {
  afdo::FieldMap fields;
  for (const auto& item : d) {
    const std::string key = py::cast<std::string>(item.first);
    if (py::isinstance<py::str>(item.second)) {
      fields[key] = py::cast<std::string>(item.second);
    } else {
      fields[key] = py::cast<double>(item.second);
    }
  }
  return fields;
}

afdo::TrustEventKind kind_from_string(const std::string& name) {
  for (const afdo::TrustEventKind kind :
       {afdo::TrustEventKind::ValidationConfirmed, afdo::TrustEventKind::ValidationRefuted,
        afdo::TrustEventKind::ValidationUncertain, afdo::TrustEventKind::SimilarPatternFound,
        afdo::TrustEventKind::TimeDecay, afdo::TrustEventKind::InstitutionalClosure}) {
    if (afdo::to_string(kind) == name) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown trust event kind: " + name);
}

afdo::TrustParameters make_params(double alpha, double beta, double gamma, double rho,
                                  double delta) {
  afdo::TrustParameters params;
  params.alpha = alpha;
  params.beta = beta;
  params.gamma = gamma;
  params.rho = rho;
  params.delta = delta;
  return params;
}

std::vector<afdo::Submission> parse_submissions(const py::list& items) {
  std::vector<afdo::Submission> submissions;
  std::int64_t order = 0;
  for (const auto& item : items) {
    const py::dict d = py::cast<py::dict>(item);
    afdo::Submission s;
    s.submitter_id = py::cast<std::string>(d["submitter"]);
    s.classification =
        afdo::classification_from_string(py::cast<std::string>(d["classification"]));
    s.reputation = py::cast<double>(d["reputation"]);
    s.confidence = py::cast<double>(d["confidence"]);
    s.order_index = d.contains("order") ? py::cast<std::int64_t>(d["order"]) : order;
    if (d.contains("category")) {
      s.category = afdo::category_from_string(py::cast<std::string>(d["category"]));
    }
    ++order;
    submissions.push_back(std::move(s));
  }
  return submissions;
}

py::dict outcome_to_dict(const afdo::ConsensusOutcome& outcome) {
  py::dict result;
  result["score"] = outcome.consensus_score;
  result["classification"] = afdo::to_string(outcome.consensus_class);
  result["included"] = outcome.included;
  result["trimmed_out"] = outcome.trimmed_out;
  result["trim_per_side"] = outcome.trim_per_side;
  result["trim_skipped"] = outcome.trim_skipped;
  result["zero_weight_fallback"] = outcome.zero_weight_fallback;
  return result;
}

py::dict evaluation_to_dict(const afdo::PolicyEvaluation& evaluation,
                            const afdo::AuditLog& log) {
  py::dict result;
  result["policy_version"] = evaluation.policy_version;
  result["condition"] = evaluation.condition_result;
  result["fired"] = evaluation.fired;
  result["blocked_by"] =
      evaluation.blocked_by ? py::cast(*evaluation.blocked_by) : py::none();
  result["error"] = evaluation.error ? py::cast(*evaluation.error) : py::none();
  result["audit_activity"] = log.at(evaluation.audit_record_id).activity;
  return result;
}

// Parsed policy set with persistent duty state, so rate-limit behaviour is
// observable across calls.
class PolicyRunner {
 public:
  explicit PolicyRunner(const std::string& text)
      : document_(afdo::parse_policy_document(text)) {}

  std::size_t policy_count() const { return document_.policies.size(); }

  std::string canonical() const { return afdo::serialise_policy_document(document_); }

  py::dict evaluate(std::size_t index, const py::dict& object_fields,
                    const std::optional<py::dict>& payload, afdo::VirtualTime clock,
                    bool strict) {
    const afdo::Policy& policy = document_.policies.at(index);
    const afdo::FieldMap fields = to_field_map(object_fields);
    std::optional<afdo::FieldMap> payload_fields;
    if (payload.has_value()) {
      payload_fields = to_field_map(*payload);
    }
    afdo::EvalOptions options;
    options.strict_fields = strict;
    const afdo::PolicyEvaluation evaluation = afdo::evaluate_policy(
        policy, fields, payload_fields ? &*payload_fields : nullptr, clock, duties_,
        log_, options);
    return evaluation_to_dict(evaluation, log_);
  }

  std::size_t audit_size() const { return log_.size(); }

 private:
  afdo::PolicyDocument document_;
  afdo::DutyState duties_;
  afdo::AuditLog log_;
};

}  // namespace

PYBIND11_MODULE(_afdo, m) {
  m.doc() = "core operations of the autonomous digital-object decision stack";

  m.def("derive_seed", &afdo::derive_seed, py::arg("parent"), py::arg("label"),
        "labelled child seed for an independent random stream");
  m.def("sha256_hex", [](const std::string& data) { return afdo::sha256_hex(data); },
        py::arg("data"));
  m.def("hash_submitter",
        [](const std::string& name) { return afdo::hash_submitter(name); },
        py::arg("name"), "salted 8-hex-digit submitter identifier");

  m.def("classification_score",
        [](const std::string& name) {
          return afdo::classification_to_score(afdo::classification_from_string(name));
        },
        py::arg("name"));
  m.def("score_classification",
        [](double score, bool toward_higher) {
          return afdo::to_string(afdo::score_to_classification(
              score, toward_higher ? afdo::MidpointTie::TowardHigher
                                   : afdo::MidpointTie::TowardLower));
        },
        py::arg("score"), py::arg("toward_higher") = false);

  m.def("consensus",
        [](const py::list& submissions, double theta, const std::string& strategy) {
          afdo::ConsensusConfig config;
          config.theta = theta;
          config.strategy = afdo::strategy_from_string(strategy);
          const std::vector<afdo::Submission> subs = parse_submissions(submissions);
          return outcome_to_dict(afdo::run_strategy(subs, config));
        },
        py::arg("submissions"), py::arg("theta") = 0.20, py::arg("strategy") = "twm",
        "aggregate submissions; each dict needs submitter, classification, "
        "reputation, confidence");

  m.def("trust_step",
        [](double score, const std::string& kind, double delta_years, double alpha,
           double beta, double gamma, double rho, double delta) {
          afdo::TrustEvent event;
          event.kind = kind_from_string(kind);
          event.delta_years = delta_years;
          return afdo::trust_step(score, event,
                                  make_params(alpha, beta, gamma, rho, delta));
        },
        py::arg("score"), py::arg("kind"), py::arg("delta_years") = 0.0,
        py::arg("alpha") = 0.30, py::arg("beta") = 0.05, py::arg("gamma") = 0.20,
        py::arg("rho") = 0.40, py::arg("delta") = 0.10);

  m.def("trust_trajectory",
        [](double initial, const std::vector<std::string>& kinds, double alpha,
           double beta, double gamma, double rho, double delta) {
          std::vector<afdo::TrustEvent> schedule;
          for (const std::string& kind : kinds) {
            afdo::TrustEvent event;
            event.kind = kind_from_string(kind);
            schedule.push_back(event);
          }
          return afdo::simulate_trust_trajectory(
              initial, schedule, make_params(alpha, beta, gamma, rho, delta));
        },
        py::arg("initial"), py::arg("kinds"), py::arg("alpha") = 0.30,
        py::arg("beta") = 0.05, py::arg("gamma") = 0.20, py::arg("rho") = 0.40,
        py::arg("delta") = 0.10);

  m.def("recovery_time",
        [](double initial, std::uint64_t seed, std::size_t cap) {
          const afdo::RecoveryResult result =
              afdo::recovery_time(initial, afdo::TrustEventMix{},
                                  afdo::TrustParameters{}, seed, cap);
          py::dict d;
          d["events"] = result.events;
          d["censored"] = result.censored;
          d["final_score"] = result.final_score;
          return d;
        },
        py::arg("initial") = 1.0, py::arg("seed") = 42, py::arg("cap") = 10'000);

  m.def("ks_distance", &afdo::ks_distance, py::arg("a"), py::arg("b"));

  m.def("canonical_policy",
        [](const std::string& text) {
          return afdo::serialise_policy_document(afdo::parse_policy_document(text));
        },
        py::arg("text"), "canonical serialisation of a policy document");

  py::class_<PolicyRunner>(m, "PolicyRunner")
      .def(py::init<const std::string&>(), py::arg("text"))
      .def_property_readonly("policy_count", &PolicyRunner::policy_count)
      .def_property_readonly("audit_size", &PolicyRunner::audit_size)
      .def("canonical", &PolicyRunner::canonical)
      .def("evaluate", &PolicyRunner::evaluate, py::arg("index"),
           py::arg("object_fields"), py::arg("payload") = std::nullopt,
           py::arg("clock") = 0, py::arg("strict") = false);

  m.def("generate_corpus_jsonl",
        [](double scale, std::uint64_t seed) {
          const std::vector<afdo::ConflictRecord> records =
              afdo::generate_corpus(afdo::default_corpus_spec(scale, seed));
          std::ostringstream out;
          afdo::write_corpus_jsonl(records, out);
          return out.str();
        },
        py::arg("scale") = 0.1, py::arg("seed") = 42);

  m.def("corpus_accuracy",
        [](const std::string& jsonl, const std::string& strategy, double theta) {
          std::istringstream in(jsonl);
          const std::vector<afdo::ConflictRecord> records = afdo::read_corpus_jsonl(in);
          return afdo::score_corpus(records, afdo::strategy_from_string(strategy),
                                    theta);
        },
        py::arg("jsonl"), py::arg("strategy") = "twm", py::arg("theta") = 0.20);

  m.def("bootstrap_ci",
        [](const std::vector<double>& indicators, std::size_t resamples, double level,
           std::uint64_t seed) {
          const afdo::BootstrapCI ci =
              afdo::bootstrap_ci(indicators, resamples, level, seed);
          return py::make_tuple(ci.mean, ci.lower, ci.upper);
        },
        py::arg("indicators"), py::arg("resamples") = 1000, py::arg("level") = 0.95,
        py::arg("seed") = 42);

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out;
          std::ostringstream err;
          const int code = afdo::cli::run_command(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "run a CLI subcommand in-process; returns (code, out, err)");
}
