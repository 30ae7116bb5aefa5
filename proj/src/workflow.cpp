#include "fraudgraph/workflow.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

#include "fraudgraph/format.hpp"

namespace fraudgraph {

std::string_view advice_name(AssociationAdvice advice) {
  return advice == AssociationAdvice::kProcessDirectly ? "process_directly" : "contact_customer";
}

std::string_view decision_name(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::kProcessed: return "processed";
    case DecisionKind::kAutoMarkedFraud: return "auto_marked_fraud";
    case DecisionKind::kCustomerContacted: return "customer_contacted";
  }
  return "?";
}

Decision route_alert(const Alert&, AssociationAdvice advice, double score, double threshold) {
  if (advice == AssociationAdvice::kProcessDirectly) return {DecisionKind::kProcessed, std::nullopt};
  if (score >= threshold) return {DecisionKind::kAutoMarkedFraud, score};
  return {DecisionKind::kCustomerContacted, score};
}

std::vector<AssociationAdvice> resolve_advice(const AdvicePolicy& policy, std::size_t alert_count) {
  if (const auto* explicit_advice = std::get_if<std::vector<AssociationAdvice>>(&policy)) {
    if (explicit_advice->size() != alert_count) {
      throw std::invalid_argument("advice sequence length " +
                                  std::to_string(explicit_advice->size()) + " != alert count " +
                                  std::to_string(alert_count));
    }
    return *explicit_advice;
  }
  const auto& bernoulli = std::get<BernoulliAdvice>(policy);
  if (!(bernoulli.contact_fraction >= 0.0 && bernoulli.contact_fraction <= 1.0)) {
    throw std::invalid_argument("contact_fraction must be in [0, 1]");
  }
  Rng rng(bernoulli.seed);
  std::vector<AssociationAdvice> advice(alert_count);
  for (auto& a : advice) {
    a = rng.bernoulli(bernoulli.contact_fraction) ? AssociationAdvice::kContactCustomer
                                                  : AssociationAdvice::kProcessDirectly;
  }
  return advice;
}

WorkflowRun simulate_with_scores(std::span<const double> scores, std::span<const Alert> alerts,
                                 std::span<const AssociationAdvice> advice, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must be in (0, 1)");
  }
  if (advice.size() != alerts.size()) throw std::invalid_argument("advice/alert length mismatch");
  WorkflowRun run;
  run.advice.assign(advice.begin(), advice.end());
  run.decisions.reserve(alerts.size());
  WorkflowStats& s = run.stats;
  for (std::size_t k = 0; k < alerts.size(); ++k) {
    const Alert& alert = alerts[k];
    if (alert.edge_index >= scores.size()) {
      throw std::out_of_range("alert " + std::to_string(k) + " references edge " +
                              std::to_string(alert.edge_index) + " outside the scored graph");
    }
    const Decision d = route_alert(alert, advice[k], scores[alert.edge_index], threshold);
    run.decisions.push_back(d);
    ++s.total_alerts;
    switch (d.kind) {
      case DecisionKind::kProcessed:
        ++s.processed;
        if (alert.true_label) ++s.missed_frauds_processed;
        break;
      case DecisionKind::kAutoMarkedFraud:
        ++s.auto_marked;
        if (!alert.true_label) ++s.false_auto_marks;
        break;
      case DecisionKind::kCustomerContacted:
        ++s.contacted;
        break;
    }
  }
  // Without the model every contact-customer alert would have been a contact.
  s.contacts_avoided = s.auto_marked;
  return run;
}

WorkflowRun simulate_workflow(const HeteroGraph& graph, const ModelParams& params,
                              std::span<const Alert> alerts, const AdvicePolicy& policy,
                              double threshold) {
  for (const Alert& a : alerts) {
    if (a.edge_index >= graph.num_transactions()) {
      throw std::out_of_range("alert references edge " + std::to_string(a.edge_index) +
                              " outside the graph");
    }
  }
  const auto advice = resolve_advice(policy, alerts.size());
  const Matrix states = model_forward(graph, params);
  const auto scores = edge_scores(graph, states, params);
  return simulate_with_scores(scores, alerts, advice, threshold);
}

std::vector<Alert> alerts_for_edges(const HeteroGraph& graph,
                                    std::span<const std::size_t> edge_indices) {
  std::vector<Alert> alerts;
  alerts.reserve(edge_indices.size());
  for (std::size_t e : edge_indices) {
    if (e >= graph.num_transactions()) throw std::out_of_range("edge index out of range");
    alerts.push_back({e, graph.edge_labels()[e] != 0});
  }
  return alerts;
}

void write_decision_log(std::ostream& out, std::span<const Alert> alerts, const WorkflowRun& run) {
  out << "edge_index,advice,score,decision,true_label\n";
  for (std::size_t k = 0; k < alerts.size(); ++k) {
    const Decision& d = run.decisions[k];
    out << alerts[k].edge_index << ',' << advice_name(run.advice[k]) << ','
        << (d.model_score ? format_double(*d.model_score) : std::string()) << ','
        << decision_name(d.kind) << ',' << (alerts[k].true_label ? 1 : 0) << '\n';
  }
}

void write_workflow_stats(std::ostream& out, const WorkflowStats& s) {
  out << "total_alerts: " << s.total_alerts << '\n'
      << "processed: " << s.processed << '\n'
      << "auto_marked: " << s.auto_marked << '\n'
      << "contacted: " << s.contacted << '\n'
      << "contacts_avoided: " << s.contacts_avoided << '\n'
      << "missed_frauds_processed: " << s.missed_frauds_processed << '\n'
      << "false_auto_marks: " << s.false_auto_marks << '\n';
}

}  // namespace fraudgraph
