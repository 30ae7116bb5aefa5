#pragma once

#include <string>
#include <vector>

#include "fraudgraph/graph.hpp"
#include "fraudgraph/ingest.hpp"

namespace fgtest {

inline fraudgraph::TransactionRecord tx(const std::string& card, std::int64_t merchant,
                                        double amount = 10.0, bool fraud = false) {
  fraudgraph::TransactionRecord r;
  r.year = 2018;
  r.month = 6;
  r.day = 15;
  r.amount = amount;
  r.use_chip = "Chip Transaction";
  r.merchant_name = merchant;
  r.merchant_city = "Reno";
  r.merchant_state = "NV";
  r.zip = 89501;
  r.mcc = 5411;
  r.is_fraud = fraud;
  r.card_id = card;
  r.hour = 12;
  r.minute = 30;
  return r;
}

inline fraudgraph::HeteroGraph graph_of(const std::vector<fraudgraph::TransactionRecord>& rows) {
  return fraudgraph::build_graph(rows, fraudgraph::fit_encoder(rows));
}

// Independent scan of the raw edge list.
inline std::vector<std::uint32_t> scan_in_neighbors(const fraudgraph::HeteroGraph& g,
                                                    std::uint32_t node,
                                                    fraudgraph::Relation rel) {
  std::vector<std::uint32_t> out;
  for (const auto& e : g.edges())
    if (e.relation == rel && e.target == node) out.push_back(e.source);
  return out;
}

}  // namespace fgtest

#include "fraudgraph/numerics.hpp"
#include "fraudgraph/rgcn.hpp"
#include "fraudgraph/synthgen.hpp"

namespace fgtest {

// Integer-valued draw in [-k, k].
inline double small_int(fraudgraph::Rng& rng, int k) {
  return static_cast<double>(static_cast<int>(rng.below(2 * k + 1)) - k);
}

struct LayerCase {
  fraudgraph::HeteroGraph graph;
  fraudgraph::Matrix states;
  fraudgraph::LayerParams params;
};

// Three fixed graphs: a single transaction, a 4-node graph with a parallel
// edge, and the 6-node toy corpus. Weights and states are small integers.
inline std::vector<LayerCase> fixed_layer_cases() {
  const std::vector<std::vector<fraudgraph::TransactionRecord>> corpora = {
      {tx("a", 1)},
      {tx("a", 1), tx("b", 1), tx("a", 2), tx("a", 1), tx("b", 2)},
      fraudgraph::toy_corpus()};
  std::vector<LayerCase> cases;
  fraudgraph::Rng rng(2718);
  for (const auto& rows : corpora) {
    fraudgraph::HeteroGraph g = graph_of(rows);
    fraudgraph::Matrix h(g.num_nodes(), 3);
    for (double& x : h.values()) x = small_int(rng, 2);
    fraudgraph::LayerParams p;
    for (std::size_t r = 0; r < fraudgraph::kNumRelations; ++r) {
      p.weight[r] = fraudgraph::Matrix(3, 2);
      p.bias[r] = fraudgraph::Matrix(1, 2);
      for (double& x : p.weight[r].values()) x = small_int(rng, 3);
      for (double& x : p.bias[r].values()) x = small_int(rng, 1);
    }
    cases.push_back({std::move(g), std::move(h), std::move(p)});
  }
  return cases;
}

}  // namespace fgtest
