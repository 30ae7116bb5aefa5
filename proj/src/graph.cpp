#include "fraudgraph/graph.hpp"

#include <ostream>
#include <stdexcept>

namespace fraudgraph {

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::kPays: return "pays";
    case Relation::kPaidBy: return "paid_by";
    case Relation::kSelf: return "self";
  }
  return "?";
}

std::optional<Relation> relation_from_name(std::string_view name) {
  for (Relation r : kRelations)
    if (relation_name(r) == name) return r;
  return std::nullopt;
}

std::uint32_t HeteroGraph::global_id(NodeRef ref) const {
  if (ref.type == NodeType::kCard) {
    if (ref.index >= num_cards()) throw std::out_of_range("card index out of range");
    return ref.index;
  }
  if (ref.index >= num_merchants()) throw std::out_of_range("merchant index out of range");
  return static_cast<std::uint32_t>(num_cards()) + ref.index;
}

NodeRef HeteroGraph::node_ref(std::uint32_t global) const {
  if (global >= num_nodes()) throw std::out_of_range("node id out of range");
  if (global < num_cards()) return {NodeType::kCard, global};
  return {NodeType::kMerchant, global - static_cast<std::uint32_t>(num_cards())};
}

std::optional<NodeRef> HeteroGraph::find_card(const std::string& key) const {
  const auto it = card_lookup_.find(key);
  if (it == card_lookup_.end()) return std::nullopt;
  return NodeRef{NodeType::kCard, it->second};
}

std::optional<NodeRef> HeteroGraph::find_merchant(std::int64_t key) const {
  const auto it = merchant_lookup_.find(key);
  if (it == merchant_lookup_.end()) return std::nullopt;
  return NodeRef{NodeType::kMerchant, it->second};
}

std::span<const Neighbor> HeteroGraph::neighbors(std::uint32_t node, Relation relation) const {
  const auto r = static_cast<std::size_t>(relation);
  if (r >= kNumRelations) throw std::out_of_range("relation id out of range");
  if (node >= num_nodes()) throw std::out_of_range("node id out of range");
  const auto& off = offsets_[r];
  return std::span<const Neighbor>(entries_[r]).subspan(off[node], off[node + 1] - off[node]);
}

void HeteroGraph::index_adjacency() {
  const std::size_t n = num_nodes();
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    offsets_[r].assign(n + 1, 0);
    entries_[r].clear();
  }
  for (const Edge& e : edges_) ++offsets_[static_cast<std::size_t>(e.relation)][e.target + 1];
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    for (std::size_t i = 0; i < n; ++i) offsets_[r][i + 1] += offsets_[r][i];
    entries_[r].resize(offsets_[r][n]);
  }
  // Counting sort by target keeps insertion order within each bucket.
  std::array<std::vector<std::uint32_t>, kNumRelations> cursor = offsets_;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    const auto r = static_cast<std::size_t>(e.relation);
    entries_[r][cursor[r][e.target]++] = Neighbor{e.source, static_cast<std::uint32_t>(k)};
  }
}

HeteroGraph HeteroGraph::from_parts(std::vector<std::string> card_keys,
                                    std::vector<std::int64_t> merchant_keys,
                                    std::vector<Edge> edges, Matrix edge_features,
                                    std::vector<std::uint8_t> edge_labels) {
  HeteroGraph g;
  g.card_keys_ = std::move(card_keys);
  g.merchant_keys_ = std::move(merchant_keys);
  for (std::uint32_t i = 0; i < g.card_keys_.size(); ++i) {
    if (!g.card_lookup_.emplace(g.card_keys_[i], i).second) {
      throw std::invalid_argument("duplicate card key " + g.card_keys_[i]);
    }
  }
  for (std::uint32_t i = 0; i < g.merchant_keys_.size(); ++i) {
    if (!g.merchant_lookup_.emplace(g.merchant_keys_[i], i).second) {
      throw std::invalid_argument("duplicate merchant key " + std::to_string(g.merchant_keys_[i]));
    }
  }
  if (edge_features.rows() != edge_labels.size()) {
    throw std::invalid_argument("edge feature rows != edge label count");
  }

  const std::size_t n = g.num_nodes();
  const auto is_card = [&](std::uint32_t v) { return v < g.num_cards(); };
  std::size_t pays = 0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (static_cast<std::size_t>(e.relation) >= kNumRelations) {
      throw std::invalid_argument("edge " + std::to_string(k) + ": unknown relation");
    }
    if (e.source >= n || e.target >= n) {
      throw std::invalid_argument("edge " + std::to_string(k) + ": node out of range");
    }
    switch (e.relation) {
      case Relation::kPays:
        if (k != pays) throw std::invalid_argument("pays edges must precede all other edges");
        if (!is_card(e.source) || is_card(e.target)) {
          throw std::invalid_argument("edge " + std::to_string(k) + ": pays must be card->merchant");
        }
        ++pays;
        break;
      case Relation::kPaidBy:
        if (is_card(e.source) || !is_card(e.target)) {
          throw std::invalid_argument("edge " + std::to_string(k) +
                                      ": paid_by must be merchant->card");
        }
        break;
      case Relation::kSelf:
        if (e.source != e.target) {
          throw std::invalid_argument("edge " + std::to_string(k) + ": self edge must be a loop");
        }
        break;
    }
  }
  if (pays != edge_labels.size()) {
    throw std::invalid_argument("pays edge count != edge label count");
  }
  g.edges_ = std::move(edges);
  g.edge_features_ = std::move(edge_features);
  g.edge_labels_ = std::move(edge_labels);
  g.index_adjacency();
  return g;
}

HeteroGraph build_graph(std::span<const TransactionRecord> records, const FeatureEncoder& encoder) {
  if (records.empty()) throw std::invalid_argument("build_graph: no records");

  std::vector<std::string> cards;
  std::vector<std::int64_t> merchants;
  std::unordered_map<std::string, std::uint32_t> card_index;
  std::unordered_map<std::int64_t, std::uint32_t> merchant_index;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> endpoints;
  endpoints.reserve(records.size());
  for (const auto& r : records) {
    auto [c, new_card] = card_index.emplace(r.card_id, static_cast<std::uint32_t>(cards.size()));
    if (new_card) cards.push_back(r.card_id);
    auto [m, new_merchant] =
        merchant_index.emplace(r.merchant_name, static_cast<std::uint32_t>(merchants.size()));
    if (new_merchant) merchants.push_back(r.merchant_name);
    endpoints.emplace_back(c->second, m->second);
  }

  const auto num_cards = static_cast<std::uint32_t>(cards.size());
  const std::size_t num_nodes = cards.size() + merchants.size();
  std::vector<Edge> edges;
  edges.reserve(2 * records.size() + num_nodes);
  for (const auto& [c, m] : endpoints) edges.push_back({c, num_cards + m, Relation::kPays});
  for (const auto& [c, m] : endpoints) edges.push_back({num_cards + m, c, Relation::kPaidBy});
  for (std::uint32_t v = 0; v < num_nodes; ++v) edges.push_back({v, v, Relation::kSelf});

  Matrix features(records.size(), encoder.feature_dim);
  std::vector<std::uint8_t> labels(records.size());
  for (std::size_t e = 0; e < records.size(); ++e) {
    encode_edge_features_into(records[e], encoder, features.row(e));
    labels[e] = records[e].is_fraud ? 1 : 0;
  }
  return HeteroGraph::from_parts(std::move(cards), std::move(merchants), std::move(edges),
                                 std::move(features), std::move(labels));
}

void write_edge_list(std::ostream& out, const HeteroGraph& graph) {
  out << "relation,source_type,source_key,target_type,target_key,edge_index\n";
  auto write_node = [&](std::uint32_t id) {
    const NodeRef ref = graph.node_ref(id);
    if (ref.type == NodeType::kCard) {
      out << "card," << csv_escape(graph.card_keys()[ref.index]);
    } else {
      out << "merchant," << graph.merchant_keys()[ref.index];
    }
  };
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    const Edge& e = graph.edges()[k];
    out << relation_name(e.relation) << ',';
    write_node(e.source);
    out << ',';
    write_node(e.target);
    out << ',' << k << '\n';
  }
}

}  // namespace fraudgraph
