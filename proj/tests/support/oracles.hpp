#pragma once

// Reference implementations written directly from the layer and head
// definitions. They read the raw edge list instead of the CSR index.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "fraudgraph/graph.hpp"
#include "fraudgraph/numerics.hpp"
#include "fraudgraph/rgcn.hpp"

namespace fgtest {

inline fraudgraph::Matrix layer_oracle(const fraudgraph::Matrix& h,
                                       const fraudgraph::HeteroGraph& g,
                                       const fraudgraph::LayerParams& p, bool activate) {
  const std::size_t n = g.num_nodes();
  const std::size_t d_in = p.weight[0].rows();
  const std::size_t d_out = p.weight[0].cols();
  fraudgraph::Matrix out(n, d_out);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < fraudgraph::kNumRelations; ++r) {
      std::vector<std::size_t> sources;
      for (const auto& e : g.edges())
        if (e.target == i && static_cast<std::size_t>(e.relation) == r) sources.push_back(e.source);
      if (sources.empty()) continue;
      const double c = static_cast<double>(sources.size());
      for (std::size_t k = 0; k < d_out; ++k) {
        double msg = 0.0;
        for (std::size_t j : sources) {
          double dot = 0.0;
          for (std::size_t m = 0; m < d_in; ++m) dot += h(j, m) * p.weight[r](m, k);
          msg += dot / c;
        }
        out(i, k) += msg + p.bias[r](0, k);
      }
    }
  }
  if (activate)
    for (double& x : out.values()) x = std::max(0.0, x);
  return out;
}

inline std::vector<double> logit_oracle(const fraudgraph::HeteroGraph& g,
                                        const fraudgraph::Matrix& states,
                                        const fraudgraph::ModelParams& p) {
  const std::size_t d = states.cols();
  std::vector<double> out;
  for (std::size_t e = 0; e < g.num_transactions(); ++e) {
    const auto& edge = g.edges()[e];
    double z = p.head_bias;
    for (std::size_t k = 0; k < d; ++k) z += p.head_weights[k] * states(edge.source, k);
    for (std::size_t k = 0; k < d; ++k) z += p.head_weights[d + k] * states(edge.target, k);
    for (std::size_t k = 0; k < g.feature_dim(); ++k)
      z += p.head_weights[2 * d + k] * g.edge_features()(e, k);
    out.push_back(z);
  }
  return out;
}

}  // namespace fgtest
