#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fraudgraph/ingest.hpp"
#include "fraudgraph/rgcn.hpp"

namespace fraudgraph {

/// Everything needed to score a corpus after training: the parameters, the
/// fitted encoder, the node keys the embedding rows belong to, and the split
/// settings used to pick held-out edges. See docs/checkpoint-format.md.
struct Checkpoint {
  ModelParams params;
  FeatureEncoder encoder;
  std::vector<std::string> card_keys;
  std::vector<std::int64_t> merchant_keys;
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  double threshold = 0.5;
};

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace fraudgraph
