#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "fraudgraph/pipeline.hpp"
#include "fraudgraph/synthgen.hpp"
#include "fraudgraph/workflow.hpp"
#include "support.hpp"

using namespace fraudgraph;

namespace {

std::vector<Alert> alerts_over(std::size_t n) {
  std::vector<Alert> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back({i, i % 7 == 0});
  return a;
}

std::vector<double> spread_scores(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(n);
  for (double& x : s) x = rng.uniform();
  return s;
}

void check_conserved(const WorkflowStats& s) {
  CHECK(s.processed + s.auto_marked + s.contacted == s.total_alerts);
  CHECK(s.contacts_avoided == s.auto_marked);
}

}  // namespace

TEST_SUITE("workflow") {

TEST_CASE("routing") {
  const Alert a{0, true};
  const Decision direct = route_alert(a, AssociationAdvice::kProcessDirectly, 0.99, 0.5);
  CHECK(direct.kind == DecisionKind::kProcessed);
  CHECK_FALSE(direct.model_score.has_value());
  const Decision high = route_alert(a, AssociationAdvice::kContactCustomer, 0.99, 0.5);
  CHECK(high.kind == DecisionKind::kAutoMarkedFraud);
  CHECK(high.model_score == 0.99);
  CHECK(route_alert(a, AssociationAdvice::kContactCustomer, 0.10, 0.5).kind ==
        DecisionKind::kCustomerContacted);
  CHECK(route_alert(a, AssociationAdvice::kContactCustomer, 0.5, 0.5).kind ==
        DecisionKind::kAutoMarkedFraud);
  CHECK(decision_name(DecisionKind::kCustomerContacted) == "customer_contacted");
  CHECK(advice_name(AssociationAdvice::kProcessDirectly) == "process_directly");
}

TEST_CASE("all process-directly advice bypasses the model") {
  const auto alerts = alerts_over(50);
  const auto scores = spread_scores(50, 1);
  const std::vector<AssociationAdvice> advice(50, AssociationAdvice::kProcessDirectly);
  const WorkflowRun run = simulate_with_scores(scores, alerts, advice, 0.5);
  CHECK(run.stats.processed == 50);
  CHECK(run.stats.contacted == 0);
  CHECK(run.stats.auto_marked == 0);
  CHECK(run.stats.missed_frauds_processed == 8);
  check_conserved(run.stats);
}

TEST_CASE("mixed advice conserves alerts and is replayable") {
  const auto alerts = alerts_over(300);
  const auto scores = spread_scores(300, 2);
  for (double fraction : {0.0, 0.3, 0.5, 1.0}) {
    const auto advice = resolve_advice(BernoulliAdvice{fraction, 5}, alerts.size());
    CHECK(advice == resolve_advice(BernoulliAdvice{fraction, 5}, alerts.size()));
    const WorkflowRun run = simulate_with_scores(scores, alerts, advice, 0.4);
    check_conserved(run.stats);
    CHECK(run.decisions == simulate_with_scores(scores, alerts, advice, 0.4).decisions);
    for (std::size_t i = 0; i < alerts.size(); ++i) {
      if (advice[i] == AssociationAdvice::kProcessDirectly)
        CHECK(run.decisions[i].kind == DecisionKind::kProcessed);
    }
  }
  const auto none = resolve_advice(BernoulliAdvice{0.0, 1}, 10);
  CHECK(std::all_of(none.begin(), none.end(),
                    [](auto a) { return a == AssociationAdvice::kProcessDirectly; }));
  CHECK_THROWS(resolve_advice(BernoulliAdvice{1.5, 1}, 10));
  CHECK_THROWS(resolve_advice(std::vector<AssociationAdvice>(3), 10));
}

TEST_CASE("threshold sweep is monotone") {
  const auto alerts = alerts_over(400);
  const auto scores = spread_scores(400, 3);
  const auto advice = resolve_advice(BernoulliAdvice{0.6, 9}, alerts.size());
  std::size_t prev_marked = alerts.size() + 1, prev_contacted = 0;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.01 + 0.098 * i;
    const WorkflowRun run = simulate_with_scores(scores, alerts, advice, t);
    check_conserved(run.stats);
    CHECK(run.stats.auto_marked <= prev_marked);
    CHECK(run.stats.contacted >= prev_contacted);
    prev_marked = run.stats.auto_marked;
    prev_contacted = run.stats.contacted;
  }
  CHECK_THROWS(simulate_with_scores(scores, alerts, advice, 0.0));
  CHECK_THROWS(simulate_with_scores(scores, alerts, advice, 1.0));
}

TEST_CASE("trained model: contacts avoided equals positive predictions") {
  GenConfig gen;
  gen.n_transactions = 1500;
  gen.fraud_rate = 0.03;
  const PreparedCorpus corpus = prepare_corpus(generate(gen), EncoderConfig{}, 0.8, 42);
  TrainConfig cfg;
  cfg.epochs = 60;
  const TrainResult trained = train(corpus.graph, {}, cfg);
  const auto alerts = alerts_for_edges(corpus.graph, corpus.split.test_edge_indices);
  const WorkflowRun run =
      simulate_workflow(corpus.graph, trained.params, alerts,
                        std::vector<AssociationAdvice>(alerts.size(),
                                                       AssociationAdvice::kContactCustomer),
                        0.3);
  const auto scores =
      edge_scores(corpus.graph, model_forward(corpus.graph, trained.params), trained.params);
  std::size_t positives = 0;
  for (const auto& a : alerts) positives += scores[a.edge_index] >= 0.3 ? 1 : 0;
  CHECK(run.stats.contacts_avoided == positives);
  CHECK(run.stats.processed == 0);
  check_conserved(run.stats);

  std::ostringstream log;
  write_decision_log(log, alerts, run);
  const std::string text = log.str();
  CHECK(text.rfind("edge_index,advice,score,decision,true_label\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        static_cast<long>(alerts.size() + 1));

  const std::vector<Alert> bad = {{corpus.graph.num_transactions(), false}};
  CHECK_THROWS_AS(simulate_workflow(corpus.graph, trained.params, bad, BernoulliAdvice{}, 0.5),
                  std::out_of_range);
}

}
