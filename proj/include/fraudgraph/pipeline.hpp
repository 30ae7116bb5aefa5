#pragma once

#include <cstdint>
#include <vector>

#include "fraudgraph/checkpoint.hpp"
#include "fraudgraph/graph.hpp"
#include "fraudgraph/ingest.hpp"
#include "fraudgraph/numerics.hpp"
#include "fraudgraph/rgcn.hpp"
#include "fraudgraph/training.hpp"

namespace fraudgraph {

/// Records plus everything derived from them for one run. The split is
/// computed from the labels first so the encoder only sees training rows.
struct PreparedCorpus {
  std::vector<TransactionRecord> records;
  SplitSpec split;
  FeatureEncoder encoder;
  HeteroGraph graph;
};

PreparedCorpus prepare_corpus(std::vector<TransactionRecord> records, const EncoderConfig& encoder,
                              double split_ratio, std::uint64_t seed);

/// Rebuilds the graph with the checkpoint's encoder and split settings.
/// Throws CheckpointError if the corpus nodes differ from the trained ones.
PreparedCorpus prepare_from_checkpoint(std::vector<TransactionRecord> records,
                                       const Checkpoint& checkpoint);

Checkpoint make_checkpoint(const PreparedCorpus& corpus, const ModelParams& params,
                           const TrainConfig& config);

/// Finite-difference check of every model parameter on the toy corpus,
/// using the mean focal loss over all of its edges.
GradReport run_gradient_check(std::uint64_t seed, double epsilon = 1e-5, double tolerance = 1e-4,
                              const ModelConfig& model = {}, const TrainConfig& loss = {});

}  // namespace fraudgraph
