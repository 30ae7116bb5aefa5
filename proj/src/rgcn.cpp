#include "fraudgraph/rgcn.hpp"

#include <algorithm>
#include <cmath>

namespace fraudgraph {

ModelParams init_params(const ModelConfig& config, std::size_t num_cards, std::size_t num_merchants,
                        std::size_t feature_dim, Rng& rng) {
  if (config.embedding_dim == 0) throw ShapeError("embedding_dim must be > 0");
  ModelParams p;
  p.card_embeddings = num_cards ? xavier_init(num_cards, config.embedding_dim, rng)
                                : Matrix(0, config.embedding_dim);
  p.merchant_embeddings = num_merchants ? xavier_init(num_merchants, config.embedding_dim, rng)
                                        : Matrix(0, config.embedding_dim);
  std::size_t width = config.embedding_dim;
  for (std::size_t out : config.layer_widths) {
    if (out == 0) throw ShapeError("layer width must be > 0");
    LayerParams layer;
    for (std::size_t r = 0; r < kNumRelations; ++r) {
      layer.weight[r] = xavier_init(width, out, rng);
      layer.bias[r] = Matrix(1, out);
    }
    p.layers.push_back(std::move(layer));
    width = out;
  }
  const std::size_t head_in = 2 * width + feature_dim;
  const Matrix head = xavier_init(1, head_in, rng);
  p.head_weights.assign(head.values().begin(), head.values().end());
  p.head_bias = 0.0;
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z;
  z.card_embeddings = Matrix(params.card_embeddings.rows(), params.card_embeddings.cols());
  z.merchant_embeddings =
      Matrix(params.merchant_embeddings.rows(), params.merchant_embeddings.cols());
  for (const auto& layer : params.layers) {
    LayerParams lz;
    for (std::size_t r = 0; r < kNumRelations; ++r) {
      lz.weight[r] = Matrix(layer.weight[r].rows(), layer.weight[r].cols());
      lz.bias[r] = Matrix(layer.bias[r].rows(), layer.bias[r].cols());
    }
    z.layers.push_back(std::move(lz));
  }
  z.head_weights.assign(params.head_weights.size(), 0.0);
  z.head_bias = 0.0;
  return z;
}

void validate_shapes(const ModelParams& p, const HeteroGraph& graph) {
  if (p.card_embeddings.rows() != graph.num_cards() ||
      p.merchant_embeddings.rows() != graph.num_merchants()) {
    throw ShapeError("embedding rows do not match graph node counts");
  }
  if (p.card_embeddings.cols() != p.merchant_embeddings.cols()) {
    throw ShapeError("card and merchant embedding widths differ");
  }
  std::size_t width = p.embedding_dim();
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& layer = p.layers[l];
    const std::size_t out = layer.output_width();
    for (std::size_t r = 0; r < kNumRelations; ++r) {
      if (layer.weight[r].rows() != width || layer.weight[r].cols() != out ||
          layer.bias[r].rows() != 1 || layer.bias[r].cols() != out) {
        throw ShapeError("layer " + std::to_string(l) + " relation " +
                         std::string(relation_name(kRelations[r])) + ": inconsistent shape");
      }
    }
    width = out;
  }
  if (p.head_weights.size() != 2 * width + graph.feature_dim()) {
    throw ShapeError("head width " + std::to_string(p.head_weights.size()) + " != 2*" +
                     std::to_string(width) + "+" + std::to_string(graph.feature_dim()));
  }
}

namespace {

template <typename Params, typename View>
std::vector<View> collect_tensors(Params& p) {
  std::vector<View> out;
  auto add = [&](std::string name, auto& m) {
    out.push_back(View{std::move(name), m.values(), m.rows(), m.cols()});
  };
  add("card_embeddings", p.card_embeddings);
  add("merchant_embeddings", p.merchant_embeddings);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    for (std::size_t r = 0; r < kNumRelations; ++r) {
      const std::string prefix =
          "layers." + std::to_string(l) + "." + std::string(relation_name(kRelations[r]));
      add(prefix + ".weight", p.layers[l].weight[r]);
      add(prefix + ".bias", p.layers[l].bias[r]);
    }
  }
  out.push_back(View{"head.weight", p.head_weights, 1, p.head_weights.size()});
  out.push_back(View{"head.bias", {&p.head_bias, 1}, 1, 1});
  return out;
}

}  // namespace

std::vector<TensorView> tensors(ModelParams& params) {
  return collect_tensors<ModelParams, TensorView>(params);
}

std::vector<ConstTensorView> tensors(const ModelParams& params) {
  return collect_tensors<const ModelParams, ConstTensorView>(params);
}

Matrix initial_states(const ModelParams& params) {
  const std::size_t nc = params.card_embeddings.rows();
  const std::size_t nm = params.merchant_embeddings.rows();
  const std::size_t d = params.embedding_dim();
  Matrix h(nc + nm, d);
  std::copy(params.card_embeddings.values().begin(), params.card_embeddings.values().end(),
            h.values().begin());
  std::copy(params.merchant_embeddings.values().begin(), params.merchant_embeddings.values().end(),
            h.values().begin() + static_cast<std::ptrdiff_t>(nc * d));
  return h;
}

namespace {

// Mean of in-neighbor states under one relation; rows with no neighbors stay zero.
Matrix aggregate(const Matrix& h, const HeteroGraph& graph, Relation relation) {
  Matrix out(graph.num_nodes(), h.cols());
  for (std::uint32_t i = 0; i < graph.num_nodes(); ++i) {
    const auto nbrs = graph.neighbors(i, relation);
    if (nbrs.empty()) continue;
    auto row = out.row(i);
    for (const Neighbor& nb : nbrs) {
      const auto src = h.row(nb.node);
      for (std::size_t k = 0; k < row.size(); ++k) row[k] += src[k];
    }
    const double inv = 1.0 / static_cast<double>(nbrs.size());
    for (double& x : row) x *= inv;
  }
  return out;
}

LayerTrace layer_trace(const Matrix& h, const HeteroGraph& graph, const LayerParams& params,
                       bool apply_activation) {
  if (h.rows() != graph.num_nodes()) {
    throw ShapeError("layer_forward: state rows " + std::to_string(h.rows()) + " != nodes " +
                     std::to_string(graph.num_nodes()));
  }
  if (h.cols() != params.input_width()) {
    throw ShapeError("layer_forward: state width " + std::to_string(h.cols()) +
                     " != layer input " + std::to_string(params.input_width()));
  }
  LayerTrace t;
  t.input = h;
  t.activated = apply_activation;
  t.pre_activation = Matrix(graph.num_nodes(), params.output_width());
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    const Relation rel = kRelations[r];
    t.aggregated[r] = aggregate(h, graph, rel);
    const Matrix msg = matmul(t.aggregated[r], params.weight[r]);
    const auto bias = params.bias[r].row(0);
    for (std::uint32_t i = 0; i < graph.num_nodes(); ++i) {
      if (graph.neighbors(i, rel).empty()) continue;
      auto out = t.pre_activation.row(i);
      const auto m = msg.row(i);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += m[k] + bias[k];
    }
  }
  return t;
}

}  // namespace

Matrix layer_forward(const Matrix& h, const HeteroGraph& graph, const LayerParams& params,
                     bool apply_activation) {
  LayerTrace t = layer_trace(h, graph, params, apply_activation);
  return apply_activation ? relu(t.pre_activation) : std::move(t.pre_activation);
}

Matrix model_forward(const HeteroGraph& graph, const ModelParams& params) {
  validate_shapes(params, graph);
  Matrix h = initial_states(params);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    h = layer_forward(h, graph, params.layers[l], l + 1 < params.layers.size());
  }
  return h;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> edge_logits(const HeteroGraph& graph, const Matrix& node_states,
                                const ModelParams& params) {
  const std::size_t d = node_states.cols();
  const std::size_t f = graph.feature_dim();
  if (node_states.rows() != graph.num_nodes() || params.head_weights.size() != 2 * d + f) {
    throw ShapeError("edge_logits: node states do not match graph/head");
  }
  const std::span<const double> w = params.head_weights;
  const auto w_card = w.subspan(0, d);
  const auto w_merchant = w.subspan(d, d);
  const auto w_feat = w.subspan(2 * d, f);
  std::vector<double> logits(graph.num_transactions());
  for (std::size_t e = 0; e < logits.size(); ++e) {
    const Edge& edge = graph.edges()[e];
    const auto su = node_states.row(edge.source);
    const auto sv = node_states.row(edge.target);
    const auto x = graph.edge_features().row(e);
    double z = params.head_bias;
    for (std::size_t k = 0; k < d; ++k) z += w_card[k] * su[k];
    for (std::size_t k = 0; k < d; ++k) z += w_merchant[k] * sv[k];
    for (std::size_t k = 0; k < f; ++k) z += w_feat[k] * x[k];
    logits[e] = z;
  }
  return logits;
}

namespace {

std::vector<double> scores_from_logits(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  for (std::size_t e = 0; e < logits.size(); ++e) {
    p[e] = logistic(std::clamp(logits[e], -kLogitClamp, kLogitClamp));
  }
  return p;
}

}  // namespace

std::vector<double> edge_scores(const HeteroGraph& graph, const Matrix& node_states,
                                const ModelParams& params) {
  return scores_from_logits(edge_logits(graph, node_states, params));
}

ForwardTrace forward_trace(const HeteroGraph& graph, const ModelParams& params) {
  validate_shapes(params, graph);
  ForwardTrace trace;
  Matrix h = initial_states(params);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const bool act = l + 1 < params.layers.size();
    trace.layers.push_back(layer_trace(h, graph, params.layers[l], act));
    const Matrix& z = trace.layers.back().pre_activation;
    h = act ? relu(z) : z;
  }
  trace.node_states = std::move(h);
  trace.logits = edge_logits(graph, trace.node_states, params);
  trace.scores = scores_from_logits(trace.logits);
  return trace;
}

ModelParams backward(const HeteroGraph& graph, const ModelParams& params, const ForwardTrace& trace,
                     std::span<const double> upstream) {
  if (upstream.size() != graph.num_transactions()) {
    throw ShapeError("backward: upstream length " + std::to_string(upstream.size()) +
                     " != pays edges " + std::to_string(graph.num_transactions()));
  }
  ModelParams grads = zeros_like(params);
  const Matrix& states = trace.node_states;
  const std::size_t d = states.cols();
  const std::size_t f = graph.feature_dim();

  // Head: logit = w . concat(s_u, s_v, x) + b, zero gradient where clamped.
  Matrix d_states(states.rows(), d);
  for (std::size_t e = 0; e < upstream.size(); ++e) {
    if (std::abs(trace.logits[e]) > kLogitClamp) continue;
    const double g = upstream[e];
    if (g == 0.0) continue;
    const Edge& edge = graph.edges()[e];
    const auto su = states.row(edge.source);
    const auto sv = states.row(edge.target);
    const auto x = graph.edge_features().row(e);
    auto du = d_states.row(edge.source);
    auto dv = d_states.row(edge.target);
    for (std::size_t k = 0; k < d; ++k) {
      grads.head_weights[k] += g * su[k];
      grads.head_weights[d + k] += g * sv[k];
      du[k] += g * params.head_weights[k];
      dv[k] += g * params.head_weights[d + k];
    }
    for (std::size_t k = 0; k < f; ++k) grads.head_weights[2 * d + k] += g * x[k];
    grads.head_bias += g;
  }

  Matrix d_h = std::move(d_states);
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const LayerTrace& t = trace.layers[l];
    const LayerParams& layer = params.layers[l];
    LayerParams& g_layer = grads.layers[l];

    Matrix d_pre = std::move(d_h);
    if (t.activated) {
      for (std::size_t k = 0; k < d_pre.size(); ++k) {
        if (!(t.pre_activation.values()[k] > 0.0)) d_pre.values()[k] = 0.0;
      }
    }

    Matrix d_in(t.input.rows(), t.input.cols());
    for (std::size_t r = 0; r < kNumRelations; ++r) {
      const Relation rel = kRelations[r];
      // Rows of aggregated[r] for nodes without neighbors are zero, so they
      // add nothing to the weight gradient; the bias needs the mask.
      g_layer.weight[r] = matmul_tn(t.aggregated[r], d_pre);
      auto db = g_layer.bias[r].row(0);
      for (std::uint32_t i = 0; i < graph.num_nodes(); ++i) {
        if (graph.neighbors(i, rel).empty()) continue;
        const auto row = d_pre.row(i);
        for (std::size_t k = 0; k < db.size(); ++k) db[k] += row[k];
      }
      const Matrix d_agg = matmul_nt(d_pre, layer.weight[r]);
      for (std::uint32_t i = 0; i < graph.num_nodes(); ++i) {
        const auto nbrs = graph.neighbors(i, rel);
        if (nbrs.empty()) continue;
        const double inv = 1.0 / static_cast<double>(nbrs.size());
        const auto src = d_agg.row(i);
        for (const Neighbor& nb : nbrs) {
          auto dst = d_in.row(nb.node);
          for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += inv * src[k];
        }
      }
    }
    d_h = std::move(d_in);
  }

  const std::size_t nc = params.card_embeddings.rows();
  const std::size_t d0 = params.embedding_dim();
  std::copy_n(d_h.values().begin(), nc * d0, grads.card_embeddings.values().begin());
  std::copy_n(d_h.values().begin() + static_cast<std::ptrdiff_t>(nc * d0),
              params.merchant_embeddings.size(), grads.merchant_embeddings.values().begin());
  return grads;
}

ModelParams model_backward(const HeteroGraph& graph, const ModelParams& params,
                           std::span<const double> upstream) {
  return backward(graph, params, forward_trace(graph, params), upstream);
}

}  // namespace fraudgraph
