#include <set>
#include <sstream>

#include "doctest.h"
#include "fraudgraph/graph.hpp"
#include "fraudgraph/synthgen.hpp"
#include "support.hpp"

using namespace fraudgraph;
using fgtest::graph_of;
using fgtest::tx;

TEST_SUITE("graph") {

TEST_CASE("one record") {
  const HeteroGraph g = graph_of({tx("a", 1)});
  CHECK(g.num_nodes() == 2);
  CHECK(g.relation_edge_count(Relation::kPays) == 1);
  CHECK(g.relation_edge_count(Relation::kPaidBy) == 1);
  CHECK(g.relation_edge_count(Relation::kSelf) == 2);
  CHECK(g.num_edges() == 4);
}

TEST_CASE("parallel edges are kept") {
  const HeteroGraph g = graph_of({tx("a", 1), tx("a", 1)});
  CHECK(g.num_nodes() == 2);
  CHECK(g.relation_edge_count(Relation::kPays) == 2);
  const auto m = g.global_id(*g.find_merchant(1));
  CHECK(g.neighbors(m, Relation::kPays).size() == 2);
  CHECK(g.degree_norm(m, Relation::kPays) == 2.0);
}

TEST_CASE("desk-scale corpus node and edge counts") {
  const auto records = generate(GenConfig{});
  std::set<std::string> cards;
  std::set<std::int64_t> merchants;
  for (const auto& r : records) {
    cards.insert(r.card_id);
    merchants.insert(r.merchant_name);
  }
  const HeteroGraph g = graph_of(records);
  CHECK(cards.size() + merchants.size() == 150);
  CHECK(g.num_nodes() == 150);
  CHECK(g.num_cards() == 100);
  CHECK(g.relation_edge_count(Relation::kPays) == 10000);
  CHECK(g.num_transactions() == 10000);

  std::size_t pays = 0, paid_by = 0;
  for (std::uint32_t i = 0; i < g.num_nodes(); ++i) {
    pays += g.neighbors(i, Relation::kPays).size();
    paid_by += g.neighbors(i, Relation::kPaidBy).size();
    for (Relation r : kRelations)
      for (const Neighbor& n : g.neighbors(i, r)) CHECK(n.edge < g.num_edges());
  }
  CHECK(pays == 10000);
  CHECK(paid_by == 10000);
}

TEST_CASE("neighbors agree with a brute-force edge scan") {
  const HeteroGraph g = graph_of({tx("a", 1), tx("b", 1), tx("c", 1), tx("a", 2), tx("d", 3),
                                  tx("b", 2), tx("e", 1), tx("a", 1)});
  const auto m1 = g.global_id(*g.find_merchant(1));
  std::vector<std::uint32_t> cards;
  for (const auto& n : g.neighbors(m1, Relation::kPays)) cards.push_back(n.node);
  CHECK(cards == fgtest::scan_in_neighbors(g, m1, Relation::kPays));
  CHECK(g.degree_norm(m1, Relation::kPays) == 5.0);

  for (std::uint32_t i = 0; i < g.num_nodes(); ++i) {
    for (Relation r : kRelations) {
      std::vector<std::uint32_t> got;
      for (const auto& n : g.neighbors(i, r)) {
        got.push_back(n.node);
        CHECK(g.edges()[n.edge].target == i);
        CHECK(g.edges()[n.edge].relation == r);
      }
      CHECK(got == fgtest::scan_in_neighbors(g, i, r));
    }
    const auto self = g.neighbors(i, Relation::kSelf);
    REQUIRE(self.size() == 1);
    CHECK(self[0].node == i);
    CHECK(g.degree_norm(i, Relation::kSelf) == 1.0);
  }

  // A card never receives "pays" edges; a merchant never receives "paid_by".
  const auto card = g.global_id(*g.find_card("a"));
  CHECK(g.neighbors(card, Relation::kPays).empty());
  CHECK(g.degree_norm(card, Relation::kPays) == 0.0);
  CHECK(g.neighbors(m1, Relation::kPaidBy).empty());
  CHECK_THROWS_AS(g.neighbors(static_cast<std::uint32_t>(g.num_nodes()), Relation::kSelf),
                  std::out_of_range);
}

TEST_CASE("node order and lookups") {
  const HeteroGraph g = graph_of({tx("b", 9), tx("a", 7), tx("b", 7)});
  CHECK(g.card_keys() == std::vector<std::string>{"b", "a"});
  CHECK(g.merchant_keys() == std::vector<std::int64_t>{9, 7});
  CHECK(g.node_ref(2) == NodeRef{NodeType::kMerchant, 0});
  CHECK(g.global_id(NodeRef{NodeType::kMerchant, 1}) == 3);
  CHECK_FALSE(g.find_card("zzz").has_value());
  CHECK(relation_from_name(relation_name(Relation::kPaidBy)) == Relation::kPaidBy);
  CHECK_FALSE(relation_from_name("owns").has_value());
}

TEST_CASE("construction is deterministic") {
  GenConfig cfg;
  cfg.n_transactions = 800;
  const auto records = generate(cfg);
  const HeteroGraph a = graph_of(records);
  const HeteroGraph b = graph_of(records);
  CHECK(a.edges() == b.edges());
  CHECK(a.card_keys() == b.card_keys());
  CHECK(a.edge_features() == b.edge_features());
  std::ostringstream da, db;
  write_edge_list(da, a);
  write_edge_list(db, b);
  CHECK(da.str() == db.str());
  CHECK(da.str().rfind("relation,source_type,source_key,target_type,target_key,edge_index\n", 0) ==
        0);
}

TEST_CASE("from_parts validation") {
  Matrix feats(1, 2);
  CHECK_NOTHROW(HeteroGraph::from_parts({"a"}, {1},
                                        {{0, 1, Relation::kPays}, {1, 0, Relation::kPaidBy}},
                                        feats, {0}));
  CHECK_THROWS_AS(HeteroGraph::from_parts({"a"}, {1}, {{1, 0, Relation::kPays}}, feats, {0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HeteroGraph::from_parts({"a"}, {1}, {{0, 5, Relation::kPays}}, feats, {0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HeteroGraph::from_parts({"a"}, {1}, {{0, 1, Relation::kSelf}}, Matrix(0, 2), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_graph({}, FeatureEncoder{}), std::invalid_argument);
}

}
