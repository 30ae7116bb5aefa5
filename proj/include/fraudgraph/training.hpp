#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fraudgraph/graph.hpp"
#include "fraudgraph/rgcn.hpp"

namespace fraudgraph {

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.005;
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  double split_ratio = 0.8;
  std::uint64_t seed = 42;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double threshold = 0.5;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const TrainConfig& config);

// ---- focal loss -----------------------------------------------------------

/// -alpha_t * (1 - p_t)^gamma * ln(p_t), with p_t = p for positives and
/// 1 - p otherwise, alpha_t = alpha for positives and 1 - alpha otherwise.
/// Throws std::domain_error unless 0 < p < 1.
double focal_loss(double p, bool label, double alpha, double gamma);

/// d focal_loss / d logit where p = logistic(logit):
///   s * alpha_t * (gamma * p_t * (1 - p_t)^gamma * ln p_t - (1 - p_t)^(gamma + 1))
/// with s = +1 for positives and -1 otherwise.
double focal_loss_grad_logit(double p, bool label, double alpha, double gamma);

struct BatchLoss {
  double loss = 0.0;                // mean over the selected edges
  std::vector<double> grad_logit;   // per pays edge; zero outside the selection
};

BatchLoss focal_loss_batch(std::span<const double> scores, std::span<const std::uint8_t> labels,
                           std::span<const std::size_t> edge_indices, double alpha, double gamma);

// ---- Adam -----------------------------------------------------------------

struct AdamHyper {
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamHyper adam_hyper(const TrainConfig& config);

struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;
};

/// Bias-corrected Adam over a list of flat tensors. Moments are allocated on
/// the first call; later calls must pass identically shaped tensors.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state,
               const AdamHyper& hyper);

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const AdamHyper& hyper);

// ---- splitting ------------------------------------------------------------

struct SplitSpec {
  std::vector<std::size_t> train_edge_indices;  // ascending
  std::vector<std::size_t> test_edge_indices;   // ascending
};

/// Label-stratified split. Per class, the train count is floor(n * ratio)
/// with leftover slots (to reach floor(N * ratio) overall) handed out by
/// largest fractional remainder; a class with >= 2 members always keeps at
/// least one edge on each side.
SplitSpec split_labels(std::span<const std::uint8_t> labels, double ratio, std::uint64_t seed);
SplitSpec split_edges(const HeteroGraph& graph, double ratio, std::uint64_t seed);

// ---- metrics --------------------------------------------------------------

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const Metrics&) const = default;
};

/// Confusion counts and derived ratios; 0/0 ratios are reported as 0.
Metrics metrics_from_predictions(std::span<const std::uint8_t> predicted,
                                 std::span<const std::uint8_t> actual);

/// Classifies score >= threshold as fraud over the given pays edges.
Metrics evaluate_scores(std::span<const double> scores, std::span<const std::uint8_t> labels,
                        std::span<const std::size_t> edge_indices, double threshold);

/// Throws std::invalid_argument on an empty index set.
Metrics evaluate(const HeteroGraph& graph, const ModelParams& params,
                 std::span<const std::size_t> edge_indices, double threshold);

// ---- training loop --------------------------------------------------------

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double test_loss = 0.0;
  double elapsed_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  Metrics train_metrics;
  Metrics test_metrics;
};

struct TrainResult {
  ModelParams params;
  TrainHistory history;
  SplitSpec split;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full-batch training: each epoch runs one forward pass over the whole
/// graph, the mean focal loss over train edges, the exact backward pass and
/// one Adam step. Test loss is measured on the same forward pass. The split
/// uses config.seed; parameter init uses a seed derived from it.
TrainResult train(const HeteroGraph& graph, const ModelConfig& model_config,
                  const TrainConfig& config);

/// epoch,train_loss,test_loss with round-trippable numbers.
void write_history_csv(std::ostream& out, const TrainHistory& history);

/// "key: value" lines for every Metrics field.
void write_metrics(std::ostream& out, const Metrics& metrics, std::string_view prefix = "");

}  // namespace fraudgraph
