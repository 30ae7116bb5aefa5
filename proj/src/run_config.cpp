#include "fraudgraph/run_config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fraudgraph {

namespace {

using json = nlohmann::json;
using FieldSetter = std::function<void(const json&)>;

template <typename T>
FieldSetter bind(T& target) {
  return [&target](const json& v) {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw json::type_error::create(302, "expected a number", &v);
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) {
        throw json::type_error::create(302, "expected a non-negative integer", &v);
      }
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw json::type_error::create(302, "expected an integer", &v);
    }
    target = v.get<T>();
  };
}

void apply_section(const json& section, const std::string& name,
                   const std::map<std::string, FieldSetter>& fields) {
  if (!section.is_object()) throw ConfigError("section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown key '" + name + "." + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigError("bad value for '" + name + "." + key + "': " + e.what());
    }
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("top level must be an object");

  RunConfig cfg;
  auto& t = cfg.train;
  auto& g = cfg.gen;
  auto& e = cfg.encoder;
  auto& w = cfg.workflow;
  const std::map<std::string, std::map<std::string, FieldSetter>> sections = {
      {"train",
       {{"epochs", bind(t.epochs)},
        {"learning_rate", bind(t.learning_rate)},
        {"focal_alpha", bind(t.focal_alpha)},
        {"focal_gamma", bind(t.focal_gamma)},
        {"split_ratio", bind(t.split_ratio)},
        {"seed", bind(t.seed)},
        {"adam_beta1", bind(t.adam_beta1)},
        {"adam_beta2", bind(t.adam_beta2)},
        {"adam_epsilon", bind(t.adam_epsilon)},
        {"threshold", bind(t.threshold)}}},
      {"gen",
       {{"n_cards", bind(g.n_cards)},
        {"n_merchants", bind(g.n_merchants)},
        {"n_transactions", bind(g.n_transactions)},
        {"fraud_rate", bind(g.fraud_rate)},
        {"hot_merchant_fraction", bind(g.hot_merchant_fraction)},
        {"pattern_strength", bind(g.pattern_strength)},
        {"seed", bind(g.seed)}}},
      {"encoder",
       {{"hash_seed", bind(e.hash_seed)},
        {"city_buckets", bind(e.city_buckets)},
        {"state_buckets", bind(e.state_buckets)},
        {"zip_buckets", bind(e.zip_buckets)},
        {"mcc_buckets", bind(e.mcc_buckets)},
        {"errors_buckets", bind(e.errors_buckets)}}},
      {"model",
       {{"embedding_dim", bind(cfg.model.embedding_dim)},
        {"layer_widths",
         [&cfg](const json& v) {
           if (!v.is_array()) throw json::type_error::create(302, "expected an array", &v);
           std::vector<std::size_t> widths;
           for (const auto& x : v) {
             if (!x.is_number_unsigned()) {
               throw json::type_error::create(302, "expected non-negative integers", &x);
             }
             widths.push_back(x.get<std::size_t>());
           }
           cfg.model.layer_widths = std::move(widths);
         }}}},
      {"workflow",
       {{"threshold", bind(w.threshold)},
        {"contact_fraction", bind(w.contact_fraction)},
        {"seed", bind(w.seed)}}},
  };

  for (const auto& [name, section] : doc.items()) {
    const auto it = sections.find(name);
    if (it == sections.end()) throw ConfigError("unknown key '" + name + "'");
    apply_section(section, name, it->second);
  }

  try {
    validate(cfg.train);
    validate(cfg.gen);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(w.threshold > 0.0 && w.threshold < 1.0)) {
    throw ConfigError("workflow.threshold must be in (0, 1)");
  }
  if (!(w.contact_fraction >= 0.0 && w.contact_fraction <= 1.0)) {
    throw ConfigError("workflow.contact_fraction must be in [0, 1]");
  }
  if (cfg.model.embedding_dim == 0) throw ConfigError("model.embedding_dim must be > 0");
  for (std::size_t width : cfg.model.layer_widths) {
    if (width == 0) throw ConfigError("model.layer_widths entries must be > 0");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

}  // namespace fraudgraph
