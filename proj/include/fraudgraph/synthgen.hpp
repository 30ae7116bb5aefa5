#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fraudgraph/ingest.hpp"

namespace fraudgraph {

struct GenConfig {
  std::size_t n_cards = 100;
  std::size_t n_merchants = 50;
  std::size_t n_transactions = 10000;
  double fraud_rate = 0.01;
  // Share of merchants that concentrate fraud.
  double hot_merchant_fraction = 0.1;
  // Scales every planted signal; 1 gives a hot-merchant fraud odds ratio of
  // about 10, 0 removes the pattern entirely.
  double pattern_strength = 1.0;
  std::uint64_t seed = 7;
};

/// Throws std::invalid_argument naming the violated constraint.
void validate(const GenConfig& config);

/// Synthetic corpus in the ingest schema. Fraud is drawn per transaction
/// and planted three ways: concentrated on hot merchants, shifted to larger
/// amounts, and clustered in the 00:00-04:59 window. When n_transactions is
/// at least max(n_cards, n_merchants) every card and merchant appears.
std::vector<TransactionRecord> generate(const GenConfig& config);

/// Merchant ids the generator marks as hot for this config, ascending.
std::vector<std::int64_t> hot_merchants(const GenConfig& config);

/// Fixed 3-card / 3-merchant / 8-transaction corpus with both labels, used by
/// the gradient check.
std::vector<TransactionRecord> toy_corpus();

}  // namespace fraudgraph
