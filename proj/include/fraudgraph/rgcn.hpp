#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fraudgraph/graph.hpp"
#include "fraudgraph/numerics.hpp"

namespace fraudgraph {

struct ModelConfig {
  std::size_t embedding_dim = 32;
  std::vector<std::size_t> layer_widths = {32, 32};
};

/// Per-relation weight (d_in x d_out) and bias (1 x d_out) of one
/// relational convolution layer.
struct LayerParams {
  std::array<Matrix, kNumRelations> weight;
  std::array<Matrix, kNumRelations> bias;

  std::size_t input_width() const { return weight[0].rows(); }
  std::size_t output_width() const { return weight[0].cols(); }
};

struct ModelParams {
  Matrix card_embeddings;      // num_cards x d0
  Matrix merchant_embeddings;  // num_merchants x d0
  std::vector<LayerParams> layers;
  // Edge head over concat(card state, merchant state, edge features).
  std::vector<double> head_weights;
  double head_bias = 0.0;

  std::size_t embedding_dim() const { return card_embeddings.cols(); }
  std::size_t state_width() const {
    return layers.empty() ? embedding_dim() : layers.back().output_width();
  }
};

/// Xavier-initialized parameters; head weights start at zero-mean Xavier too.
ModelParams init_params(const ModelConfig& config, std::size_t num_cards, std::size_t num_merchants,
                        std::size_t feature_dim, Rng& rng);

ModelParams zeros_like(const ModelParams& params);

/// Throws ShapeError if params do not fit the graph or are internally
/// inconsistent.
void validate_shapes(const ModelParams& params, const HeteroGraph& graph);

/// Named flat view of one parameter tensor, in a fixed order shared by the
/// optimizer, the checkpoint writer and the gradient checker.
template <typename T>
struct BasicTensorView {
  std::string name;
  std::span<T> values;
  std::size_t rows = 1;
  std::size_t cols = 1;
};
using TensorView = BasicTensorView<double>;
using ConstTensorView = BasicTensorView<const double>;

std::vector<TensorView> tensors(ModelParams& params);
std::vector<ConstTensorView> tensors(const ModelParams& params);

Matrix initial_states(const ModelParams& params);

/// One relational convolution:
///   h_i' = act( sum over r with N_i^r non-empty of
///               (1/|N_i^r|) sum_{j in N_i^r} h_j W_r + b_r )
Matrix layer_forward(const Matrix& h, const HeteroGraph& graph, const LayerParams& params,
                     bool apply_activation);

/// Embeddings followed by every layer; ReLU after all but the last.
Matrix model_forward(const HeteroGraph& graph, const ModelParams& params);

inline constexpr double kLogitClamp = 30.0;

double logistic(double x);

/// Unclamped head output per "pays" edge.
std::vector<double> edge_logits(const HeteroGraph& graph, const Matrix& node_states,
                                const ModelParams& params);
/// Fraud probability per "pays" edge, logits clamped to +-kLogitClamp.
std::vector<double> edge_scores(const HeteroGraph& graph, const Matrix& node_states,
                                const ModelParams& params);

struct LayerTrace {
  Matrix input;
  std::array<Matrix, kNumRelations> aggregated;  // per-relation neighbor means
  Matrix pre_activation;
  bool activated = false;
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;
  Matrix node_states;
  std::vector<double> logits;  // unclamped
  std::vector<double> scores;
};

ForwardTrace forward_trace(const HeteroGraph& graph, const ModelParams& params);

/// Reverse pass given dL/dlogit for each "pays" edge, where the logit is the
/// clamped head output fed to the logistic.
ModelParams backward(const HeteroGraph& graph, const ModelParams& params, const ForwardTrace& trace,
                     std::span<const double> upstream);

/// Recomputes the forward pass, then runs backward().
ModelParams model_backward(const HeteroGraph& graph, const ModelParams& params,
                           std::span<const double> upstream);

}  // namespace fraudgraph
