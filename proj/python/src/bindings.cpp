#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <numeric>
#include <sstream>

#include "fraudgraph/checkpoint.hpp"
#include "fraudgraph/cli.hpp"
#include "fraudgraph/pipeline.hpp"
#include "fraudgraph/run_config.hpp"
#include "fraudgraph/synthgen.hpp"
#include "fraudgraph/training.hpp"
#include "fraudgraph/workflow.hpp"

namespace py = pybind11;
using namespace fraudgraph;

namespace {

// A trained (or loaded) model bundled with the corpus it was fitted on.
struct TrainedModel {
  PreparedCorpus corpus;
  ModelParams params;
  TrainHistory history;
  TrainConfig config;

  std::vector<double> scores() const {
    return edge_scores(corpus.graph, model_forward(corpus.graph, params), params);
  }

  std::vector<std::size_t> edges(const std::string& split) const {
    if (split == "test") return corpus.split.test_edge_indices;
    if (split == "train") return corpus.split.train_edge_indices;
    if (split == "all") {
      std::vector<std::size_t> all(corpus.graph.num_transactions());
      std::iota(all.begin(), all.end(), std::size_t{0});
      return all;
    }
    throw py::value_error("split must be 'test', 'train' or 'all'");
  }
};

TrainedModel train_model(std::vector<TransactionRecord> records, const TrainConfig& config,
                         const ModelConfig& model, const EncoderConfig& encoder) {
  validate(config);
  TrainedModel out{prepare_corpus(std::move(records), encoder, config.split_ratio, config.seed),
                   {}, {}, config};
  TrainResult r = train(out.corpus.graph, model, config);
  out.params = std::move(r.params);
  out.history = std::move(r.history);
  return out;
}

TrainedModel load_trained(const std::string& path, std::vector<TransactionRecord> records) {
  Checkpoint ck = load_checkpoint(path);
  TrainConfig cfg;
  cfg.split_ratio = ck.split_ratio;
  cfg.seed = ck.seed;
  cfg.threshold = ck.threshold;
  PreparedCorpus corpus = prepare_from_checkpoint(std::move(records), ck);
  return TrainedModel{std::move(corpus), std::move(ck.params), {}, cfg};
}

std::string repr_metrics(const Metrics& m) {
  std::ostringstream s;
  s << "Metrics(accuracy=" << m.accuracy << ", precision=" << m.precision
    << ", recall=" << m.recall << ", f1=" << m.f1 << ", tp=" << m.tp << ", fp=" << m.fp
    << ", tn=" << m.tn << ", fn=" << m.fn << ")";
  return s.str();
}

}  // namespace

PYBIND11_MODULE(_fraudgraph, m) {
  m.doc() = "Relational graph convolution fraud detection core";

  auto value_error = py::handle(PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", value_error);
  py::register_exception<ConfigError>(m, "ConfigError", value_error);
  py::register_exception<CheckpointError>(m, "CheckpointError", value_error);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  py::class_<TransactionRecord>(m, "TransactionRecord")
      .def(py::init<>())
      .def_readwrite("year", &TransactionRecord::year)
      .def_readwrite("month", &TransactionRecord::month)
      .def_readwrite("day", &TransactionRecord::day)
      .def_readwrite("amount", &TransactionRecord::amount)
      .def_readwrite("use_chip", &TransactionRecord::use_chip)
      .def_readwrite("merchant_name", &TransactionRecord::merchant_name)
      .def_readwrite("merchant_city", &TransactionRecord::merchant_city)
      .def_readwrite("merchant_state", &TransactionRecord::merchant_state)
      .def_readwrite("zip", &TransactionRecord::zip)
      .def_readwrite("mcc", &TransactionRecord::mcc)
      .def_readwrite("errors", &TransactionRecord::errors)
      .def_readwrite("is_fraud", &TransactionRecord::is_fraud)
      .def_readwrite("card_id", &TransactionRecord::card_id)
      .def_readwrite("hour", &TransactionRecord::hour)
      .def_readwrite("minute", &TransactionRecord::minute)
      .def(py::self == py::self)
      .def("__repr__", [](const TransactionRecord& r) {
        return "TransactionRecord(card_id='" + r.card_id + "', merchant_name=" +
               std::to_string(r.merchant_name) + ", amount=" + std::to_string(r.amount) +
               ", is_fraud=" + (r.is_fraud ? "True" : "False") + ")";
      });

  py::class_<GenConfig>(m, "GenConfig")
      .def(py::init<>())
      .def_readwrite("n_cards", &GenConfig::n_cards)
      .def_readwrite("n_merchants", &GenConfig::n_merchants)
      .def_readwrite("n_transactions", &GenConfig::n_transactions)
      .def_readwrite("fraud_rate", &GenConfig::fraud_rate)
      .def_readwrite("hot_merchant_fraction", &GenConfig::hot_merchant_fraction)
      .def_readwrite("pattern_strength", &GenConfig::pattern_strength)
      .def_readwrite("seed", &GenConfig::seed);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("focal_alpha", &TrainConfig::focal_alpha)
      .def_readwrite("focal_gamma", &TrainConfig::focal_gamma)
      .def_readwrite("split_ratio", &TrainConfig::split_ratio)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("adam_beta1", &TrainConfig::adam_beta1)
      .def_readwrite("adam_beta2", &TrainConfig::adam_beta2)
      .def_readwrite("adam_epsilon", &TrainConfig::adam_epsilon)
      .def_readwrite("threshold", &TrainConfig::threshold);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("embedding_dim", &ModelConfig::embedding_dim)
      .def_readwrite("layer_widths", &ModelConfig::layer_widths);

  py::class_<EncoderConfig>(m, "EncoderConfig")
      .def(py::init<>())
      .def_readwrite("hash_seed", &EncoderConfig::hash_seed)
      .def_readwrite("city_buckets", &EncoderConfig::city_buckets)
      .def_readwrite("state_buckets", &EncoderConfig::state_buckets)
      .def_readwrite("zip_buckets", &EncoderConfig::zip_buckets)
      .def_readwrite("mcc_buckets", &EncoderConfig::mcc_buckets)
      .def_readwrite("errors_buckets", &EncoderConfig::errors_buckets);

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("accuracy", &Metrics::accuracy)
      .def_readonly("precision", &Metrics::precision)
      .def_readonly("recall", &Metrics::recall)
      .def_readonly("f1", &Metrics::f1)
      .def_readonly("tp", &Metrics::tp)
      .def_readonly("fp", &Metrics::fp)
      .def_readonly("tn", &Metrics::tn)
      .def_readonly("fn", &Metrics::fn)
      .def("__repr__", &repr_metrics);

  py::class_<GradReport>(m, "GradReport")
      .def_readonly("max_rel_error", &GradReport::max_rel_error)
      .def_readonly("worst_param", &GradReport::worst_param)
      .def_readonly("per_param_errors", &GradReport::per_param_errors)
      .def_readonly("tolerance", &GradReport::tolerance)
      .def_readonly("scalars_checked", &GradReport::scalars_checked)
      .def_property_readonly("passed", &GradReport::passed);

  py::class_<WorkflowStats>(m, "WorkflowStats")
      .def_readonly("total_alerts", &WorkflowStats::total_alerts)
      .def_readonly("processed", &WorkflowStats::processed)
      .def_readonly("auto_marked", &WorkflowStats::auto_marked)
      .def_readonly("contacted", &WorkflowStats::contacted)
      .def_readonly("contacts_avoided", &WorkflowStats::contacts_avoided)
      .def_readonly("missed_frauds_processed", &WorkflowStats::missed_frauds_processed)
      .def_readonly("false_auto_marks", &WorkflowStats::false_auto_marks);

  py::class_<TrainedModel>(m, "TrainedModel")
      .def_property_readonly("history",
                             [](const TrainedModel& t) {
                               std::vector<std::tuple<int, double, double>> rows;
                               for (const auto& e : t.history.epochs)
                                 rows.emplace_back(e.epoch, e.train_loss, e.test_loss);
                               return rows;
                             })
      .def_property_readonly("train_metrics",
                             [](const TrainedModel& t) { return t.history.train_metrics; })
      .def_property_readonly("test_metrics",
                             [](const TrainedModel& t) { return t.history.test_metrics; })
      .def_property_readonly("num_nodes",
                             [](const TrainedModel& t) { return t.corpus.graph.num_nodes(); })
      .def("edges", &TrainedModel::edges, py::arg("split") = "test",
           "Pays-edge indices of the 'test', 'train' or 'all' split.")
      .def("scores", &TrainedModel::scores, "Fraud probability for every transaction.")
      .def(
          "evaluate",
          [](const TrainedModel& t, const std::string& split, std::optional<double> threshold) {
            return evaluate(t.corpus.graph, t.params, t.edges(split),
                            threshold.value_or(t.config.threshold));
          },
          py::arg("split") = "test", py::arg("threshold") = py::none())
      .def(
          "save",
          [](const TrainedModel& t, const std::string& path) {
            save_checkpoint(path, make_checkpoint(t.corpus, t.params, t.config));
          },
          py::arg("path"))
      .def(
          "write_history",
          [](const TrainedModel& t, const std::string& path) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + path);
            write_history_csv(out, t.history);
          },
          py::arg("path"));

  m.def("generate", &generate, py::arg("config") = GenConfig{},
        "Synthetic transactions with planted fraud patterns.");
  m.def(
      "read_transactions",
      [](const std::string& path, bool strict) {
        return parse_transactions_file(path, strict).records;
      },
      py::arg("path"), py::arg("strict") = true);
  m.def(
      "write_transactions",
      [](const std::string& path, const std::vector<TransactionRecord>& records) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path);
        write_transactions(out, records);
      },
      py::arg("path"), py::arg("records"));

  m.def("focal_loss", &focal_loss, py::arg("p"), py::arg("label"), py::arg("alpha") = 0.25,
        py::arg("gamma") = 2.0);
  m.def("focal_loss_grad_logit", &focal_loss_grad_logit, py::arg("p"), py::arg("label"),
        py::arg("alpha") = 0.25, py::arg("gamma") = 2.0);

  m.def(
      "gradient_check",
      [](std::uint64_t seed, double epsilon, double tolerance) {
        return run_gradient_check(seed, epsilon, tolerance);
      },
      py::arg("seed") = 7, py::arg("epsilon") = 1e-5, py::arg("tolerance") = 1e-4,
      "Finite-difference check of every model parameter on the toy graph.");

  m.def("train", &train_model, py::arg("records"), py::arg("config") = TrainConfig{},
        py::arg("model") = ModelConfig{}, py::arg("encoder") = EncoderConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def("load_model", &load_trained, py::arg("path"), py::arg("records"),
        "Checkpoint plus the corpus it was trained on.");

  m.def(
      "simulate",
      [](const TrainedModel& t, double contact_fraction, double threshold, std::uint64_t seed,
         const std::string& split) {
        const auto alerts = alerts_for_edges(t.corpus.graph, t.edges(split));
        return simulate_workflow(t.corpus.graph, t.params, alerts,
                                 BernoulliAdvice{contact_fraction, seed}, threshold)
            .stats;
      },
      py::arg("model"), py::arg("contact_fraction") = 0.5, py::arg("threshold") = 0.5,
      py::arg("seed") = 11, py::arg("split") = "test");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one CLI subcommand in-process; returns (exit_code, stdout, stderr).");
}
