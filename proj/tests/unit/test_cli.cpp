#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fraudgraph/checkpoint.hpp"
#include "fraudgraph/cli.hpp"
#include "fraudgraph/format.hpp"
#include "fraudgraph/pipeline.hpp"
#include "fraudgraph/run_config.hpp"
#include "fraudgraph/synthgen.hpp"

namespace fs = std::filesystem;
using namespace fraudgraph;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fraudgraph_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string value_of(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  return {};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run config parsing") {
  const RunConfig c = parse_run_config(
      R"({"train": {"epochs": 12, "learning_rate": 0.01, "seed": 3},
          "gen": {"n_transactions": 500, "pattern_strength": 2},
          "encoder": {"city_buckets": 8}, "model": {"layer_widths": [16]},
          "workflow": {"contact_fraction": 0.25}})");
  CHECK(c.train.epochs == 12);
  CHECK(c.train.learning_rate == 0.01);
  CHECK(c.train.seed == 3);
  CHECK(c.train.focal_gamma == 2.0);
  CHECK(c.gen.n_transactions == 500);
  CHECK(c.gen.pattern_strength == 2.0);
  CHECK(c.encoder.city_buckets == 8);
  CHECK(c.model.layer_widths == std::vector<std::size_t>{16});
  CHECK(c.workflow.contact_fraction == 0.25);
  CHECK(parse_run_config("{}").train.epochs == 200);

  try {
    parse_run_config(R"({"train": {"epoch": 3}})");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("train.epoch") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_config(R"({"trian": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"train": {"epochs": "ten"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"train": {"epochs": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125}) CHECK(parse_double(format_double(x)) == x);
  CHECK(parse_double("0x1.8p+1") == 3.0);
  CHECK_THROWS(parse_double("1.5x"));
  CHECK_THROWS(parse_double(""));
}

TEST_CASE("checkpoint round trip") {
  GenConfig gen;
  gen.n_transactions = 600;
  gen.fraud_rate = 0.05;
  const PreparedCorpus corpus = prepare_corpus(generate(gen), EncoderConfig{}, 0.8, 5);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 5;
  const TrainResult trained = train(corpus.graph, {}, cfg);
  const Checkpoint ck = make_checkpoint(corpus, trained.params, cfg);

  std::stringstream buf;
  write_checkpoint(buf, ck);
  const Checkpoint back = read_checkpoint(buf);
  CHECK(back.encoder == ck.encoder);
  CHECK(back.card_keys == ck.card_keys);
  CHECK(back.merchant_keys == ck.merchant_keys);
  CHECK(back.seed == 5);
  const auto a = tensors(ck.params);
  const auto b = tensors(back.params);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(std::equal(a[i].values.begin(), a[i].values.end(), b[i].values.begin(), b[i].values.end()));
  }

  const PreparedCorpus again = prepare_from_checkpoint(corpus.records, back);
  CHECK(again.split.test_edge_indices == corpus.split.test_edge_indices);
  CHECK(again.graph.edge_features() == corpus.graph.edge_features());

  auto fewer = corpus.records;
  fewer.resize(50);
  CHECK_THROWS_AS(prepare_from_checkpoint(fewer, back), CheckpointError);

  std::istringstream junk("fraudgraph-checkpoint 99\n");
  CHECK_THROWS_AS(read_checkpoint(junk), CheckpointError);
  std::string text = buf.str();
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(read_checkpoint(truncated), CheckpointError);
}

TEST_CASE("usage errors exit 1") {
  const auto foo = invoke({"foo"});
  CHECK(foo.code == cli::kExitUsage);
  CHECK(foo.err == "error: usage: unknown subcommand 'foo'\n");
  CHECK(foo.out.find("gradcheck") != std::string::npos);

  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"gen"}).code == cli::kExitUsage);
  CHECK(invoke({"train", "--data"}).code == cli::kExitUsage);
  CHECK(invoke({"gradcheck", "--seed", "abc"}).code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("gradcheck subcommand") {
  const auto ok = invoke({"gradcheck", "--seed", "7"});
  CHECK(ok.code == cli::kExitOk);
  CHECK(parse_double(value_of(ok.out, "max_rel_error")) <= 1e-4);
  CHECK(value_of(ok.out, "status") == "pass");

  const auto strict = invoke({"gradcheck", "--seed", "7", "--tolerance", "1e-30"});
  CHECK(strict.code == cli::kExitGradcheck);
  CHECK(value_of(strict.out, "status") == "fail");
}

TEST_CASE("gen, train, eval and simulate end to end") {
  const fs::path dir = scratch("e2e");
  const std::string data = (dir / "corpus.csv").string();
  const std::string model = (dir / "model.ckpt").string();
  const std::string hist = (dir / "history.csv").string();

  auto g = invoke({"gen", "--out", data, "--n-transactions", "800", "--fraud-rate", "0.05",
                   "--seed", "3"});
  REQUIRE(g.code == cli::kExitOk);
  CHECK(value_of(g.out, "transactions") == "800");

  auto t = invoke({"train", "--data", data, "--out-model", model, "--out-history", hist,
                   "--epochs", "7", "--dump-graph", (dir / "edges.csv").string()});
  REQUIRE(t.code == cli::kExitOk);
  CHECK(value_of(t.out, "epochs") == "7");
  const std::string history = slurp(hist);
  CHECK(history.rfind("epoch,train_loss,test_loss\n", 0) == 0);
  CHECK(std::count(history.begin(), history.end(), '\n') == 8);
  CHECK(fs::exists(dir / "edges.csv"));

  auto e = invoke({"eval", "--data", data, "--model", model, "--split", "all"});
  REQUIRE(e.code == cli::kExitOk);
  CHECK(value_of(e.out, "edges") == "800");
  CHECK_FALSE(value_of(e.out, "baseline_all_legit_accuracy").empty());
  CHECK(value_of(e.out, "baseline_all_legit_recall") == "0");

  auto s = invoke({"simulate", "--data", data, "--model", model, "--contact-fraction", "1",
                   "--out", (dir / "decisions.csv").string()});
  REQUIRE(s.code == cli::kExitOk);
  CHECK(value_of(s.out, "total_alerts") == "160");
  CHECK(value_of(s.out, "processed") == "0");
}

TEST_CASE("data and config errors exit 2") {
  const fs::path dir = scratch("errors");
  const fs::path bad = dir / "bad.csv";
  std::ofstream(bad) << "Year,Month\n2019,3\n";
  auto t = invoke({"train", "--data", bad.string(), "--out-model", (dir / "m").string(),
                   "--out-history", (dir / "h").string()});
  CHECK(t.code == cli::kExitData);
  CHECK(t.err.rfind("error: parse: ", 0) == 0);
  CHECK(std::count(t.err.begin(), t.err.end(), '\n') == 1);

  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"train": {"epoch": 3}})";
  auto c = invoke({"gen", "--config", cfg.string(), "--out", (dir / "x.csv").string()});
  CHECK(c.code == cli::kExitData);
  CHECK(c.err.rfind("error: config: ", 0) == 0);

  const fs::path junk = dir / "junk.ckpt";
  std::ofstream(junk) << "not a checkpoint\n";
  auto g = invoke({"gen", "--out", (dir / "ok.csv").string(), "--n-transactions", "300",
                   "--fraud-rate", "0.05"});
  REQUIRE(g.code == cli::kExitOk);
  auto e = invoke({"eval", "--data", (dir / "ok.csv").string(), "--model", junk.string()});
  CHECK(e.code == cli::kExitData);
  CHECK(e.err.rfind("error: checkpoint: ", 0) == 0);

  auto bad_gen = invoke({"gen", "--out", (dir / "y.csv").string(), "--fraud-rate", "2"});
  CHECK(bad_gen.code == cli::kExitData);
}

}
