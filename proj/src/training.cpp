#include "fraudgraph/training.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fraudgraph/format.hpp"

namespace fraudgraph {

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("train config: " + what); };
  if (c.epochs < 1) fail("epochs must be >= 1");
  if (!(c.learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(c.focal_alpha > 0.0 && c.focal_alpha <= 1.0)) fail("focal_alpha must be in (0, 1]");
  if (!(c.focal_gamma >= 0.0)) fail("focal_gamma must be >= 0");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) fail("split_ratio must be in (0, 1)");
  if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0)) fail("adam_beta1 must be in [0, 1)");
  if (!(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0)) fail("adam_beta2 must be in [0, 1)");
  if (!(c.adam_epsilon > 0.0)) fail("adam_epsilon must be > 0");
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) fail("threshold must be in (0, 1)");
}

double focal_loss(double p, bool label, double alpha, double gamma) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("focal_loss: probability " + std::to_string(p) + " outside (0, 1)");
  }
  const double pt = label ? p : 1.0 - p;
  const double at = label ? alpha : 1.0 - alpha;
  return -at * std::pow(1.0 - pt, gamma) * std::log(pt);
}

double focal_loss_grad_logit(double p, bool label, double alpha, double gamma) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("focal_loss: probability " + std::to_string(p) + " outside (0, 1)");
  }
  const double pt = label ? p : 1.0 - p;
  const double at = label ? alpha : 1.0 - alpha;
  const double sign = label ? 1.0 : -1.0;
  const double q = 1.0 - pt;
  return sign * at * (gamma * pt * std::pow(q, gamma) * std::log(pt) - std::pow(q, gamma + 1.0));
}

BatchLoss focal_loss_batch(std::span<const double> scores, std::span<const std::uint8_t> labels,
                           std::span<const std::size_t> edge_indices, double alpha, double gamma) {
  if (scores.size() != labels.size()) throw ShapeError("focal_loss_batch: scores/labels length");
  BatchLoss out;
  out.grad_logit.assign(scores.size(), 0.0);
  if (edge_indices.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(edge_indices.size());
  double total = 0.0;
  for (std::size_t e : edge_indices) {
    const bool y = labels[e] != 0;
    total += focal_loss(scores[e], y, alpha, gamma);
    out.grad_logit[e] = focal_loss_grad_logit(scores[e], y, alpha, gamma) * inv_n;
  }
  out.loss = total * inv_n;
  return out;
}

AdamHyper adam_hyper(const TrainConfig& c) {
  return {c.learning_rate, c.adam_beta1, c.adam_beta2, c.adam_epsilon};
}

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state,
               const AdamHyper& hyper) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: tensor count mismatch");
  if (state.step == 0 && state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: state tensor count mismatch");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (grads[t].size() != params[t].size() || state.first_moment[t].size() != params[t].size() ||
        state.second_moment[t].size() != params[t].size()) {
      throw ShapeError("adam_step: shape mismatch in tensor " + std::to_string(t));
    }
  }

  ++state.step;
  const double step = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(hyper.beta1, step);
  const double correction2 = 1.0 - std::pow(hyper.beta2, step);
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& m = state.first_moment[t];
    auto& v = state.second_moment[t];
    for (std::size_t k = 0; k < params[t].size(); ++k) {
      const double g = grads[t][k];
      m[k] = hyper.beta1 * m[k] + (1.0 - hyper.beta1) * g;
      v[k] = hyper.beta2 * v[k] + (1.0 - hyper.beta2) * g * g;
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      params[t][k] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
  }
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const AdamHyper& hyper) {
  const auto p_views = tensors(params);
  const auto g_views = tensors(grads);
  std::vector<std::span<double>> p;
  std::vector<std::span<const double>> g;
  for (const auto& v : p_views) p.push_back(v.values);
  for (const auto& v : g_views) g.push_back(v.values);
  adam_step(p, g, state, hyper);
}

SplitSpec split_labels(std::span<const std::uint8_t> labels, double ratio, std::uint64_t seed) {
  if (labels.size() < 2) throw std::invalid_argument("split_edges: need at least 2 edges");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split_edges: ratio not in (0,1)");

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t e = 0; e < labels.size(); ++e) by_class[labels[e] ? 1 : 0].push_back(e);

  Rng rng(seed);
  for (auto& members : by_class) rng.shuffle(members);

  std::array<std::size_t, 2> take{};
  std::array<std::size_t, 2> cap{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t n = by_class[c].size();
    const double exact = static_cast<double>(n) * ratio;
    take[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(take[c]);
    cap[c] = n >= 2 ? n - 1 : n;
    if (n >= 2) take[c] = std::clamp<std::size_t>(take[c], 1, n - 1);
    assigned += take[c];
  }
  const auto target =
      static_cast<std::size_t>(std::floor(static_cast<double>(labels.size()) * ratio));
  // Leftover slots go by largest remainder (ties to the negative class), then
  // to whichever class still has room.
  const std::size_t first = remainder[1] > remainder[0] ? 1 : 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c : {first, 1 - first}) {
      if (pass == 0 && !(remainder[c] > 0.0)) continue;
      if (assigned < target && take[c] < cap[c]) {
        ++take[c];
        ++assigned;
      }
    }
  }

  SplitSpec split;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& members = by_class[c];
    split.train_edge_indices.insert(split.train_edge_indices.end(), members.begin(),
                                    members.begin() + static_cast<std::ptrdiff_t>(take[c]));
    split.test_edge_indices.insert(split.test_edge_indices.end(),
                                   members.begin() + static_cast<std::ptrdiff_t>(take[c]),
                                   members.end());
  }
  std::sort(split.train_edge_indices.begin(), split.train_edge_indices.end());
  std::sort(split.test_edge_indices.begin(), split.test_edge_indices.end());
  return split;
}

SplitSpec split_edges(const HeteroGraph& graph, double ratio, std::uint64_t seed) {
  return split_labels(graph.edge_labels(), ratio, seed);
}

Metrics metrics_from_predictions(std::span<const std::uint8_t> predicted,
                                 std::span<const std::uint8_t> actual) {
  if (predicted.size() != actual.size()) throw ShapeError("metrics: length mismatch");
  Metrics m;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const bool p = predicted[k] != 0;
    const bool a = actual[k] != 0;
    if (p && a) ++m.tp;
    else if (p) ++m.fp;
    else if (a) ++m.fn;
    else ++m.tn;
  }
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(m.tp + m.tn, m.total());
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

Metrics evaluate_scores(std::span<const double> scores, std::span<const std::uint8_t> labels,
                        std::span<const std::size_t> edge_indices, double threshold) {
  if (edge_indices.empty()) throw std::invalid_argument("evaluate: empty edge index set");
  std::vector<std::uint8_t> predicted, actual;
  predicted.reserve(edge_indices.size());
  actual.reserve(edge_indices.size());
  for (std::size_t e : edge_indices) {
    if (e >= scores.size()) throw std::out_of_range("evaluate: edge index out of range");
    predicted.push_back(scores[e] >= threshold ? 1 : 0);
    actual.push_back(labels[e]);
  }
  return metrics_from_predictions(predicted, actual);
}

Metrics evaluate(const HeteroGraph& graph, const ModelParams& params,
                 std::span<const std::size_t> edge_indices, double threshold) {
  if (edge_indices.empty()) throw std::invalid_argument("evaluate: empty edge index set");
  const Matrix states = model_forward(graph, params);
  const auto scores = edge_scores(graph, states, params);
  return evaluate_scores(scores, graph.edge_labels(), edge_indices, threshold);
}

TrainResult train(const HeteroGraph& graph, const ModelConfig& model_config,
                  const TrainConfig& config) {
  validate(config);
  const auto& labels = graph.edge_labels();
  const auto positives = std::count(labels.begin(), labels.end(), std::uint8_t{1});
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
    throw TrainingError("degenerate corpus: only one label class present");
  }

  TrainResult result;
  result.split = split_edges(graph, config.split_ratio, config.seed);
  Rng init_rng(derive_seed(config.seed, 1));
  result.params = init_params(model_config, graph.num_cards(), graph.num_merchants(),
                              graph.feature_dim(), init_rng);

  const AdamHyper hyper = adam_hyper(config);
  AdamState adam;
  const auto start = std::chrono::steady_clock::now();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const ForwardTrace trace = forward_trace(graph, result.params);
    const BatchLoss train_loss = focal_loss_batch(trace.scores, labels, result.split.train_edge_indices,
                                                  config.focal_alpha, config.focal_gamma);
    const BatchLoss test_loss = focal_loss_batch(trace.scores, labels, result.split.test_edge_indices,
                                                 config.focal_alpha, config.focal_gamma);
    if (!std::isfinite(train_loss.loss) || !std::isfinite(test_loss.loss)) {
      throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
    }
    const ModelParams grads = backward(graph, result.params, trace, train_loss.grad_logit);
    adam_step(result.params, grads, adam, hyper);

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.history.epochs.push_back({epoch, train_loss.loss, test_loss.loss, elapsed.count()});
  }

  const Matrix states = model_forward(graph, result.params);
  const auto scores = edge_scores(graph, states, result.params);
  result.history.train_metrics =
      evaluate_scores(scores, labels, result.split.train_edge_indices, config.threshold);
  if (!result.split.test_edge_indices.empty()) {
    result.history.test_metrics =
        evaluate_scores(scores, labels, result.split.test_edge_indices, config.threshold);
  }
  return result;
}

void write_history_csv(std::ostream& out, const TrainHistory& history) {
  out << "epoch,train_loss,test_loss\n";
  for (const auto& e : history.epochs) {
    out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.test_loss)
        << '\n';
  }
}

void write_metrics(std::ostream& out, const Metrics& m, std::string_view prefix) {
  auto line = [&](std::string_view key, const std::string& value) {
    out << prefix << key << ": " << value << '\n';
  };
  line("accuracy", format_double(m.accuracy));
  line("precision", format_double(m.precision));
  line("recall", format_double(m.recall));
  line("f1", format_double(m.f1));
  line("tp", std::to_string(m.tp));
  line("fp", std::to_string(m.fp));
  line("tn", std::to_string(m.tn));
  line("fn", std::to_string(m.fn));
}

}  // namespace fraudgraph
