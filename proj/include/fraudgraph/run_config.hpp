#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fraudgraph/ingest.hpp"
#include "fraudgraph/rgcn.hpp"
#include "fraudgraph/synthgen.hpp"
#include "fraudgraph/training.hpp"

namespace fraudgraph {

struct WorkflowConfig {
  double threshold = 0.5;
  double contact_fraction = 0.5;
  std::uint64_t seed = 11;
};

/// JSON run configuration with sections "train", "gen", "encoder", "model"
/// and "workflow". Every field is optional and defaults to the struct value.
struct RunConfig {
  TrainConfig train;
  GenConfig gen;
  EncoderConfig encoder;
  ModelConfig model;
  WorkflowConfig workflow;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError on malformed JSON, a wrong value type or an unknown
/// key (reported by its dotted path, e.g. "train.epoch").
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace fraudgraph
