#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "fraudgraph/graph.hpp"
#include "fraudgraph/rgcn.hpp"

namespace fraudgraph {

// A transaction flagged by the processor's rule engine.
struct Alert {
  std::size_t edge_index = 0;
  bool true_label = false;  // outcome accounting only
};

enum class AssociationAdvice : std::uint8_t { kProcessDirectly, kContactCustomer };

enum class DecisionKind : std::uint8_t { kProcessed, kAutoMarkedFraud, kCustomerContacted };

struct Decision {
  DecisionKind kind = DecisionKind::kProcessed;
  std::optional<double> model_score;  // present iff the model was consulted

  bool operator==(const Decision&) const = default;
};

struct WorkflowStats {
  std::size_t total_alerts = 0;
  std::size_t processed = 0;
  std::size_t auto_marked = 0;
  std::size_t contacted = 0;
  std::size_t contacts_avoided = 0;
  std::size_t missed_frauds_processed = 0;
  std::size_t false_auto_marks = 0;

  bool operator==(const WorkflowStats&) const = default;
};

std::string_view advice_name(AssociationAdvice advice);
std::string_view decision_name(DecisionKind kind);

/// Process-directly advice bypasses the model. Otherwise a score at or above
/// the threshold auto-marks the transaction as fraud and anything below it
/// goes to the customer.
Decision route_alert(const Alert& alert, AssociationAdvice advice, double score, double threshold);

/// Each alert independently gets ContactCustomer with probability
/// contact_fraction.
struct BernoulliAdvice {
  double contact_fraction = 0.5;
  std::uint64_t seed = 0;
};

using AdvicePolicy = std::variant<std::vector<AssociationAdvice>, BernoulliAdvice>;

std::vector<AssociationAdvice> resolve_advice(const AdvicePolicy& policy, std::size_t alert_count);

struct WorkflowRun {
  std::vector<AssociationAdvice> advice;
  std::vector<Decision> decisions;
  WorkflowStats stats;
};

/// Tallies decisions made from precomputed scores (one per pays edge).
WorkflowRun simulate_with_scores(std::span<const double> scores, std::span<const Alert> alerts,
                                 std::span<const AssociationAdvice> advice, double threshold);

/// Scores the graph once and routes every alert.
/// Throws std::out_of_range for an alert that references no pays edge.
WorkflowRun simulate_workflow(const HeteroGraph& graph, const ModelParams& params,
                              std::span<const Alert> alerts, const AdvicePolicy& policy,
                              double threshold);

/// Default alert stream: one alert per listed pays edge.
std::vector<Alert> alerts_for_edges(const HeteroGraph& graph,
                                    std::span<const std::size_t> edge_indices);

/// edge_index,advice,score,decision,true_label
void write_decision_log(std::ostream& out, std::span<const Alert> alerts, const WorkflowRun& run);
void write_workflow_stats(std::ostream& out, const WorkflowStats& stats);

}  // namespace fraudgraph
