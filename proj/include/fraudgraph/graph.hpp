#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fraudgraph/ingest.hpp"
#include "fraudgraph/numerics.hpp"

namespace fraudgraph {

// Relation set over which each convolution sums. A "pays" edge runs
// card -> merchant; "paid_by" mirrors it; every node carries one "self" loop.
enum class Relation : std::uint8_t { kPays = 0, kPaidBy = 1, kSelf = 2 };
inline constexpr std::size_t kNumRelations = 3;
inline constexpr std::array<Relation, kNumRelations> kRelations = {
    Relation::kPays, Relation::kPaidBy, Relation::kSelf};

std::string_view relation_name(Relation r);
std::optional<Relation> relation_from_name(std::string_view name);

enum class NodeType : std::uint8_t { kCard, kMerchant };

/// Typed node reference. Global ids place cards first, then merchants.
struct NodeRef {
  NodeType type = NodeType::kCard;
  std::uint32_t index = 0;

  bool operator==(const NodeRef&) const = default;
};

struct Edge {
  std::uint32_t source = 0;  // global node id
  std::uint32_t target = 0;
  Relation relation = Relation::kPays;

  bool operator==(const Edge&) const = default;
};

struct Neighbor {
  std::uint32_t node = 0;  // global id of the in-neighbor
  std::uint32_t edge = 0;  // index into edges()

  bool operator==(const Neighbor&) const = default;
};

/// Immutable heterogeneous card/merchant graph with per-relation CSR
/// in-neighbor indices. Edge index e < num_transactions() is the "pays" edge
/// of transaction e; its features and label live at row e.
class HeteroGraph {
 public:
  /// Assembles a graph from explicit parts. "pays" edges must come first and
  /// match the feature rows one to one. Throws std::invalid_argument when an
  /// endpoint is out of range or has the wrong node type for its relation.
  static HeteroGraph from_parts(std::vector<std::string> card_keys,
                                std::vector<std::int64_t> merchant_keys, std::vector<Edge> edges,
                                Matrix edge_features, std::vector<std::uint8_t> edge_labels);

  std::size_t num_cards() const { return card_keys_.size(); }
  std::size_t num_merchants() const { return merchant_keys_.size(); }
  std::size_t num_nodes() const { return card_keys_.size() + merchant_keys_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_transactions() const { return edge_labels_.size(); }
  std::size_t feature_dim() const { return edge_features_.cols(); }

  const std::vector<std::string>& card_keys() const { return card_keys_; }
  const std::vector<std::int64_t>& merchant_keys() const { return merchant_keys_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Matrix& edge_features() const { return edge_features_; }
  const std::vector<std::uint8_t>& edge_labels() const { return edge_labels_; }

  std::uint32_t global_id(NodeRef ref) const;
  NodeRef node_ref(std::uint32_t global) const;
  std::optional<NodeRef> find_card(const std::string& key) const;
  std::optional<NodeRef> find_merchant(std::int64_t key) const;

  /// In-neighbors of `node` under `relation`, in edge insertion order.
  /// Throws std::out_of_range for an invalid node.
  std::span<const Neighbor> neighbors(std::uint32_t node, Relation relation) const;
  std::span<const Neighbor> neighbors(NodeRef node, Relation relation) const {
    return neighbors(global_id(node), relation);
  }

  /// |N_i^r|; 0 means the relation contributes nothing to node i.
  double degree_norm(std::uint32_t node, Relation relation) const {
    return static_cast<double>(neighbors(node, relation).size());
  }

  std::size_t relation_edge_count(Relation relation) const {
    return entries_[static_cast<std::size_t>(relation)].size();
  }

 private:
  HeteroGraph() = default;
  void index_adjacency();

  std::vector<std::string> card_keys_;
  std::vector<std::int64_t> merchant_keys_;
  std::unordered_map<std::string, std::uint32_t> card_lookup_;
  std::unordered_map<std::int64_t, std::uint32_t> merchant_lookup_;
  std::vector<Edge> edges_;
  Matrix edge_features_;
  std::vector<std::uint8_t> edge_labels_;
  std::array<std::vector<std::uint32_t>, kNumRelations> offsets_;
  std::array<std::vector<Neighbor>, kNumRelations> entries_;
};

/// One card node per distinct card_id and one merchant node per distinct
/// merchant_name, both in first-appearance order. Edges: one "pays" per record
/// (parallel edges kept), then the mirrored "paid_by" edges, then one "self"
/// per node. Throws std::invalid_argument on empty input.
HeteroGraph build_graph(std::span<const TransactionRecord> records, const FeatureEncoder& encoder);

/// Debug dump: relation,source_type,source_key,target_type,target_key,edge_index
void write_edge_list(std::ostream& out, const HeteroGraph& graph);

}  // namespace fraudgraph
