#include "fraudgraph/pipeline.hpp"

#include "fraudgraph/synthgen.hpp"

namespace fraudgraph {

PreparedCorpus prepare_corpus(std::vector<TransactionRecord> records, const EncoderConfig& encoder,
                              double split_ratio, std::uint64_t seed) {
  if (records.empty()) throw std::invalid_argument("corpus has no records");
  std::vector<std::uint8_t> labels(records.size());
  for (std::size_t e = 0; e < records.size(); ++e) labels[e] = records[e].is_fraud ? 1 : 0;
  SplitSpec split = split_labels(labels, split_ratio, seed);

  std::vector<TransactionRecord> train_rows;
  train_rows.reserve(split.train_edge_indices.size());
  for (std::size_t e : split.train_edge_indices) train_rows.push_back(records[e]);
  FeatureEncoder fitted = fit_encoder(train_rows, encoder);
  HeteroGraph graph = build_graph(records, fitted);
  return PreparedCorpus{std::move(records), std::move(split), std::move(fitted), std::move(graph)};
}

PreparedCorpus prepare_from_checkpoint(std::vector<TransactionRecord> records,
                                       const Checkpoint& checkpoint) {
  if (records.empty()) throw std::invalid_argument("corpus has no records");
  HeteroGraph graph = build_graph(records, checkpoint.encoder);
  if (graph.card_keys() != checkpoint.card_keys ||
      graph.merchant_keys() != checkpoint.merchant_keys) {
    throw CheckpointError("corpus nodes do not match the checkpoint (" +
                          std::to_string(graph.num_cards()) + " cards, " +
                          std::to_string(graph.num_merchants()) + " merchants vs " +
                          std::to_string(checkpoint.card_keys.size()) + ", " +
                          std::to_string(checkpoint.merchant_keys.size()) + ")");
  }
  validate_shapes(checkpoint.params, graph);
  SplitSpec split = split_edges(graph, checkpoint.split_ratio, checkpoint.seed);
  return PreparedCorpus{std::move(records), std::move(split), checkpoint.encoder, std::move(graph)};
}

Checkpoint make_checkpoint(const PreparedCorpus& corpus, const ModelParams& params,
                           const TrainConfig& config) {
  Checkpoint ck;
  ck.params = params;
  ck.encoder = corpus.encoder;
  ck.card_keys = corpus.graph.card_keys();
  ck.merchant_keys = corpus.graph.merchant_keys();
  ck.split_ratio = config.split_ratio;
  ck.seed = config.seed;
  ck.threshold = config.threshold;
  return ck;
}

GradReport run_gradient_check(std::uint64_t seed, double epsilon, double tolerance,
                              const ModelConfig& model, const TrainConfig& loss) {
  const auto records = toy_corpus();
  const FeatureEncoder encoder = fit_encoder(records);
  const HeteroGraph graph = build_graph(records, encoder);
  Rng rng(seed);
  ModelParams params =
      init_params(model, graph.num_cards(), graph.num_merchants(), graph.feature_dim(), rng);
  // A non-zero head bias so its gradient is exercised away from the origin.
  params.head_bias = rng.uniform(-0.5, 0.5);
  for (auto& layer : params.layers)
    for (auto& b : layer.bias)
      for (double& x : b.values()) x = rng.uniform(-0.1, 0.1);

  std::vector<std::size_t> all(graph.num_transactions());
  for (std::size_t e = 0; e < all.size(); ++e) all[e] = e;

  auto batch = [&] {
    const ForwardTrace trace = forward_trace(graph, params);
    return std::pair{trace, focal_loss_batch(trace.scores, graph.edge_labels(), all,
                                             loss.focal_alpha, loss.focal_gamma)};
  };
  const auto [trace, analytic_loss] = batch();
  const ModelParams grads = backward(graph, params, trace, analytic_loss.grad_logit);

  std::vector<ParamSlot> slots;
  const auto p_views = tensors(params);
  const auto g_views = tensors(grads);
  for (std::size_t t = 0; t < p_views.size(); ++t) {
    slots.push_back({p_views[t].name, p_views[t].values, g_views[t].values, p_views[t].cols});
  }
  return check_gradients([&] { return batch().second.loss; }, slots, epsilon, tolerance);
}

}  // namespace fraudgraph
