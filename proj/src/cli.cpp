#include "fraudgraph/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fraudgraph/checkpoint.hpp"
#include "fraudgraph/format.hpp"
#include "fraudgraph/pipeline.hpp"
#include "fraudgraph/run_config.hpp"
#include "fraudgraph/synthgen.hpp"
#include "fraudgraph/workflow.hpp"

namespace fraudgraph::cli {

namespace {

std::string one_line(std::string text) {
  for (char& c : text)
    if (c == '\n' || c == '\r') c = ' ';
  return text;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

struct Options {
  std::string config_path;
  std::string data_path;
  std::string out_path;
  std::string model_path;
  std::string history_path;
  std::string graph_dump_path;
  std::string split = "test";
  bool lenient = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<double> threshold;
  std::optional<double> contact_fraction;
  std::optional<std::size_t> n_cards;
  std::optional<std::size_t> n_merchants;
  std::optional<std::size_t> n_transactions;
  std::optional<double> fraud_rate;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
};

RunConfig load_config(const Options& o) {
  return o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
}

std::vector<TransactionRecord> load_records(const Options& o, std::ostream& err) {
  ParseResult parsed = parse_transactions_file(o.data_path, !o.lenient);
  if (parsed.skipped_rows > 0) {
    err << "warning: skipped " << parsed.skipped_rows << " malformed rows\n";
  }
  return std::move(parsed.records);
}

int cmd_gen(const Options& o, std::ostream& out) {
  RunConfig cfg = load_config(o);
  if (o.seed) cfg.gen.seed = *o.seed;
  if (o.n_cards) cfg.gen.n_cards = *o.n_cards;
  if (o.n_merchants) cfg.gen.n_merchants = *o.n_merchants;
  if (o.n_transactions) cfg.gen.n_transactions = *o.n_transactions;
  if (o.fraud_rate) cfg.gen.fraud_rate = *o.fraud_rate;
  const auto records = generate(cfg.gen);
  auto file = open_output(o.out_path);
  write_transactions(file, records);
  std::size_t frauds = 0;
  for (const auto& r : records) frauds += r.is_fraud ? 1 : 0;
  out << "transactions: " << records.size() << '\n' << "frauds: " << frauds << '\n';
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_config(o);
  if (o.seed) cfg.train.seed = *o.seed;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  if (o.learning_rate) cfg.train.learning_rate = *o.learning_rate;
  if (o.threshold) cfg.train.threshold = *o.threshold;
  validate(cfg.train);

  PreparedCorpus corpus =
      prepare_corpus(load_records(o, err), cfg.encoder, cfg.train.split_ratio, cfg.train.seed);
  if (!o.graph_dump_path.empty()) {
    auto dump = open_output(o.graph_dump_path);
    write_edge_list(dump, corpus.graph);
  }
  const TrainResult result = train(corpus.graph, cfg.model, cfg.train);

  save_checkpoint(o.model_path, make_checkpoint(corpus, result.params, cfg.train));
  auto history = open_output(o.history_path);
  write_history_csv(history, result.history);

  out << "nodes: " << corpus.graph.num_nodes() << '\n'
      << "transactions: " << corpus.graph.num_transactions() << '\n'
      << "epochs: " << result.history.epochs.size() << '\n'
      << "final_train_loss: " << format_double(result.history.epochs.back().train_loss) << '\n'
      << "final_test_loss: " << format_double(result.history.epochs.back().test_loss) << '\n';
  write_metrics(out, result.history.test_metrics, "test_");
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const Checkpoint ck = load_checkpoint(o.model_path);
  const PreparedCorpus corpus = prepare_from_checkpoint(load_records(o, err), ck);
  std::vector<std::size_t> edges;
  if (o.split == "test") {
    edges = corpus.split.test_edge_indices;
  } else if (o.split == "train") {
    edges = corpus.split.train_edge_indices;
  } else {
    edges.resize(corpus.graph.num_transactions());
    for (std::size_t e = 0; e < edges.size(); ++e) edges[e] = e;
  }
  const double threshold = o.threshold.value_or(ck.threshold);
  const Metrics model = evaluate(corpus.graph, ck.params, edges, threshold);

  // The all-legit baseline shows how much of the accuracy is prevalence alone.
  std::vector<std::uint8_t> none(edges.size(), 0), actual;
  for (std::size_t e : edges) actual.push_back(corpus.graph.edge_labels()[e]);
  const Metrics baseline = metrics_from_predictions(none, actual);

  out << "split: " << o.split << '\n' << "edges: " << edges.size() << '\n'
      << "threshold: " << format_double(threshold) << '\n';
  write_metrics(out, model);
  write_metrics(out, baseline, "baseline_all_legit_");
  return kExitOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  const GradReport report = run_gradient_check(o.seed.value_or(7), o.epsilon, o.tolerance);
  out << "scalars_checked: " << report.scalars_checked << '\n'
      << "max_rel_error: " << format_double(report.max_rel_error) << '\n'
      << "worst_param: " << report.worst_param << '\n'
      << "tolerance: " << format_double(report.tolerance) << '\n';
  for (const auto& [path, rel] : report.per_param_errors) {
    out << "param " << path << ": " << format_double(rel) << '\n';
  }
  out << "status: " << (report.passed() ? "pass" : "fail") << '\n';
  return report.passed() ? kExitOk : kExitGradcheck;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_config(o);
  if (o.seed) cfg.workflow.seed = *o.seed;
  if (o.threshold) cfg.workflow.threshold = *o.threshold;
  if (o.contact_fraction) cfg.workflow.contact_fraction = *o.contact_fraction;

  const Checkpoint ck = load_checkpoint(o.model_path);
  const PreparedCorpus corpus = prepare_from_checkpoint(load_records(o, err), ck);
  const auto alerts = alerts_for_edges(corpus.graph, corpus.split.test_edge_indices);
  const WorkflowRun run =
      simulate_workflow(corpus.graph, ck.params, alerts,
                        BernoulliAdvice{cfg.workflow.contact_fraction, cfg.workflow.seed},
                        cfg.workflow.threshold);
  auto log = open_output(o.out_path);
  write_decision_log(log, alerts, run);
  write_workflow_stats(out, run.stats);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relational graph convolution fraud detection toolkit", "fraudgraph"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "write a synthetic transaction corpus");
  gen->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  gen->add_option("--out", o.out_path, "output CSV")->required();
  gen->add_option("--seed", o.seed, "generator seed (overrides gen.seed)");
  gen->add_option("--n-cards", o.n_cards);
  gen->add_option("--n-merchants", o.n_merchants);
  gen->add_option("--n-transactions", o.n_transactions);
  gen->add_option("--fraud-rate", o.fraud_rate);

  auto* tr = app.add_subcommand("train", "parse, encode, build the graph and train");
  tr->add_option("--data", o.data_path, "transaction CSV")->required()->check(CLI::ExistingFile);
  tr->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  tr->add_option("--out-model", o.model_path, "checkpoint output")->required();
  tr->add_option("--out-history", o.history_path, "loss history CSV output")->required();
  tr->add_option("--dump-graph", o.graph_dump_path, "optional edge-list dump");
  tr->add_option("--seed", o.seed, "overrides train.seed");
  tr->add_option("--epochs", o.epochs, "overrides train.epochs");
  tr->add_option("--lr", o.learning_rate, "overrides train.learning_rate");
  tr->add_option("--threshold", o.threshold, "overrides train.threshold");
  tr->add_flag("--lenient", o.lenient, "skip malformed rows instead of failing");

  auto* ev = app.add_subcommand("eval", "score a corpus with a trained checkpoint");
  ev->add_option("--data", o.data_path, "transaction CSV")->required()->check(CLI::ExistingFile);
  ev->add_option("--model", o.model_path, "checkpoint")->required()->check(CLI::ExistingFile);
  ev->add_option("--threshold", o.threshold, "decision threshold (default: checkpoint)");
  ev->add_option("--split", o.split, "edges to evaluate")
      ->check(CLI::IsMember({"test", "train", "all"}));
  ev->add_flag("--lenient", o.lenient, "skip malformed rows instead of failing");

  auto* gc = app.add_subcommand("gradcheck", "finite-difference check on the toy graph");
  gc->add_option("--seed", o.seed, "parameter seed");
  gc->add_option("--epsilon", o.epsilon, "central difference step");
  gc->add_option("--tolerance", o.tolerance, "max relative error");

  auto* sim = app.add_subcommand("simulate", "run the contact-routing workflow on test edges");
  sim->add_option("--data", o.data_path, "transaction CSV")->required()->check(CLI::ExistingFile);
  sim->add_option("--model", o.model_path, "checkpoint")->required()->check(CLI::ExistingFile);
  sim->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  sim->add_option("--contact-fraction", o.contact_fraction, "P(association advises contact)");
  sim->add_option("--threshold", o.threshold, "model decision threshold");
  sim->add_option("--seed", o.seed, "advice seed");
  sim->add_option("--out", o.out_path, "decision log CSV")->required();
  sim->add_flag("--lenient", o.lenient, "skip malformed rows instead of failing");

  if (!args.empty() && !args.front().starts_with('-') && !app.get_subcommand_no_throw(args.front())) {
    err << "error: usage: unknown subcommand '" << one_line(args.front()) << "'\n";
    out << app.help();
    return kExitUsage;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    out << app.help();
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(o, out);
    if (tr->parsed()) return cmd_train(o, out, err);
    if (ev->parsed()) return cmd_eval(o, out, err);
    if (gc->parsed()) return cmd_gradcheck(o, out);
    if (sim->parsed()) return cmd_simulate(o, out, err);
  } catch (const ParseError& e) {
    err << "error: parse: " << one_line(e.what()) << '\n';
    return kExitData;
  } catch (const ConfigError& e) {
    err << "error: config: " << one_line(e.what()) << '\n';
    return kExitData;
  } catch (const CheckpointError& e) {
    err << "error: checkpoint: " << one_line(e.what()) << '\n';
    return kExitData;
  } catch (const TrainingError& e) {
    err << "error: training: " << one_line(e.what()) << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: data: " << one_line(e.what()) << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace fraudgraph::cli
