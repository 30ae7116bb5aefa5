#include "fraudgraph/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fraudgraph/format.hpp"

namespace fraudgraph {

namespace {

// Values are written as C99 hex floats so every bit survives the round trip.
std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void write_tensor(std::ostream& out, const ConstTensorView& t) {
  out << "tensor " << t.name << ' ' << t.rows << ' ' << t.cols << '\n';
  for (std::size_t r = 0; r < t.rows; ++r) {
    for (std::size_t c = 0; c < t.cols; ++c) {
      out << (c ? " " : "") << hex(t.values[r * t.cols + c]);
    }
    out << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) fail("unexpected end of file");
    ++line_no_;
    return s;
  }

  // Reads "<key> <rest>" and returns the whitespace-separated rest.
  std::istringstream keyed(const std::string& key) {
    const std::string s = line();
    if (s.compare(0, key.size() + 1, key + " ") != 0 && s != key) {
      fail("expected '" + key + "'");
    }
    return std::istringstream(s.size() > key.size() ? s.substr(key.size() + 1) : "");
  }

  template <typename T>
  T value(std::istringstream& ss, const std::string& what) {
    T v{};
    if (!(ss >> v)) fail("bad " + what);
    return v;
  }

  double real(std::istringstream& ss, const std::string& what) {
    std::string tok;
    if (!(ss >> tok)) fail("missing " + what);
    try {
      return parse_double(tok);
    } catch (const std::invalid_argument&) {
      fail("bad " + what);
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw CheckpointError("checkpoint line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

void read_tensor(Reader& rd, const std::string& name, Matrix& into) {
  auto hdr = rd.keyed("tensor");
  const auto got = rd.value<std::string>(hdr, "tensor name");
  if (got != name) rd.fail("expected tensor " + name + ", found " + got);
  const auto rows = rd.value<std::size_t>(hdr, "rows");
  const auto cols = rd.value<std::size_t>(hdr, "cols");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::istringstream ss(rd.line());
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rd.real(ss, name + " value");
  }
  into = std::move(m);
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  const ModelParams& p = ck.params;
  // Keys are stored one per line.
  const auto check_line = [](const std::string& text, const char* what) {
    if (text.find_first_of("\r\n") != std::string::npos) {
      throw CheckpointError(std::string(what) + " contains a line break: cannot checkpoint");
    }
  };
  for (const auto& k : ck.card_keys) check_line(k, "card id");
  for (const auto& c : ck.encoder.chip_categories) check_line(c, "chip category");
  out << "fraudgraph-checkpoint " << kCheckpointVersion << '\n';
  out << "relations " << kNumRelations;
  for (Relation r : kRelations) out << ' ' << relation_name(r);
  out << '\n';
  out << "layers " << p.layers.size() << '\n';
  out << "split_ratio " << hex(ck.split_ratio) << '\n';
  out << "seed " << ck.seed << '\n';
  out << "threshold " << hex(ck.threshold) << '\n';

  const auto& e = ck.encoder;
  out << "encoder " << hex(e.amount_mean) << ' ' << hex(e.amount_std) << ' '
      << e.config.hash_seed << ' ' << e.config.city_buckets << ' ' << e.config.state_buckets << ' '
      << e.config.zip_buckets << ' ' << e.config.mcc_buckets << ' ' << e.config.errors_buckets
      << ' ' << e.feature_dim << '\n';
  out << "chip_categories " << e.chip_categories.size() << '\n';
  for (const auto& c : e.chip_categories) out << c << '\n';

  out << "cards " << ck.card_keys.size() << '\n';
  for (const auto& k : ck.card_keys) out << k << '\n';
  out << "merchants " << ck.merchant_keys.size() << '\n';
  for (auto k : ck.merchant_keys) out << k << '\n';

  for (const auto& t : tensors(p)) write_tensor(out, t);
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader rd(in);
  Checkpoint ck;
  {
    auto ss = rd.keyed("fraudgraph-checkpoint");
    const int version = rd.value<int>(ss, "version");
    if (version != kCheckpointVersion) rd.fail("unsupported version " + std::to_string(version));
  }
  {
    auto ss = rd.keyed("relations");
    if (rd.value<std::size_t>(ss, "relation count") != kNumRelations) rd.fail("relation count");
    for (Relation r : kRelations) {
      if (rd.value<std::string>(ss, "relation") != relation_name(r)) rd.fail("relation order");
    }
  }
  std::size_t num_layers;
  {
    auto ss = rd.keyed("layers");
    num_layers = rd.value<std::size_t>(ss, "layer count");
  }
  {
    auto ss = rd.keyed("split_ratio");
    ck.split_ratio = rd.real(ss, "split_ratio");
  }
  {
    auto ss = rd.keyed("seed");
    ck.seed = rd.value<std::uint64_t>(ss, "seed");
  }
  {
    auto ss = rd.keyed("threshold");
    ck.threshold = rd.real(ss, "threshold");
  }
  {
    auto ss = rd.keyed("encoder");
    auto& e = ck.encoder;
    e.amount_mean = rd.real(ss, "amount_mean");
    e.amount_std = rd.real(ss, "amount_std");
    e.config.hash_seed = rd.value<std::uint64_t>(ss, "hash_seed");
    e.config.city_buckets = rd.value<std::size_t>(ss, "city_buckets");
    e.config.state_buckets = rd.value<std::size_t>(ss, "state_buckets");
    e.config.zip_buckets = rd.value<std::size_t>(ss, "zip_buckets");
    e.config.mcc_buckets = rd.value<std::size_t>(ss, "mcc_buckets");
    e.config.errors_buckets = rd.value<std::size_t>(ss, "errors_buckets");
    e.feature_dim = rd.value<std::size_t>(ss, "feature_dim");
    if (e.feature_dim != encoded_width(e.config)) rd.fail("feature_dim inconsistent with buckets");
  }
  {
    auto ss = rd.keyed("chip_categories");
    const auto n = rd.value<std::size_t>(ss, "chip category count");
    if (n > FeatureEncoder::kChipSlots) rd.fail("too many chip categories");
    for (std::size_t i = 0; i < n; ++i) ck.encoder.chip_categories.push_back(rd.line());
  }
  {
    auto ss = rd.keyed("cards");
    const auto n = rd.value<std::size_t>(ss, "card count");
    ck.card_keys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ck.card_keys.push_back(rd.line());
  }
  {
    auto ss = rd.keyed("merchants");
    const auto n = rd.value<std::size_t>(ss, "merchant count");
    ck.merchant_keys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::istringstream ks(rd.line());
      ck.merchant_keys.push_back(rd.value<std::int64_t>(ks, "merchant key"));
    }
  }

  ModelParams& p = ck.params;
  read_tensor(rd, "card_embeddings", p.card_embeddings);
  read_tensor(rd, "merchant_embeddings", p.merchant_embeddings);
  p.layers.resize(num_layers);
  for (std::size_t l = 0; l < num_layers; ++l) {
    for (std::size_t r = 0; r < kNumRelations; ++r) {
      const std::string prefix =
          "layers." + std::to_string(l) + "." + std::string(relation_name(kRelations[r]));
      read_tensor(rd, prefix + ".weight", p.layers[l].weight[r]);
      read_tensor(rd, prefix + ".bias", p.layers[l].bias[r]);
    }
  }
  Matrix head;
  read_tensor(rd, "head.weight", head);
  p.head_weights.assign(head.values().begin(), head.values().end());
  Matrix bias;
  read_tensor(rd, "head.bias", bias);
  if (bias.size() != 1) rd.fail("head.bias must be 1x1");
  p.head_bias = bias(0, 0);
  if (rd.line() != "end") rd.fail("expected 'end'");
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_checkpoint(out, checkpoint);
  if (!out) throw std::runtime_error("write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_checkpoint(in);
}

}  // namespace fraudgraph
