#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fraudgraph/ingest.hpp"
#include "fraudgraph/synthgen.hpp"

using namespace fraudgraph;

namespace {

std::size_t fraud_count(const std::vector<TransactionRecord>& rows) {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.is_fraud ? 1 : 0;
  return n;
}

std::string as_csv(const std::vector<TransactionRecord>& rows) {
  std::ostringstream out;
  write_transactions(out, rows);
  return out.str();
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("prevalence at one in a thousand") {
  GenConfig cfg;
  cfg.fraud_rate = 0.001;
  const double n = static_cast<double>(cfg.n_transactions);
  const double mean = n * cfg.fraud_rate;
  const double sigma = std::sqrt(n * cfg.fraud_rate * (1 - cfg.fraud_rate));
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    cfg.seed = seed;
    const auto k = static_cast<double>(fraud_count(generate(cfg)));
    CHECK(std::abs(k - mean) <= 3 * sigma);
  }
}

TEST_CASE("prevalence converges with size") {
  GenConfig cfg;
  cfg.n_transactions = 100000;
  cfg.n_cards = 500;
  cfg.n_merchants = 200;
  const double n = static_cast<double>(cfg.n_transactions);
  const auto k = static_cast<double>(fraud_count(generate(cfg)));
  CHECK(std::abs(k / n - cfg.fraud_rate) <= 3 * std::sqrt(cfg.fraud_rate * (1 - cfg.fraud_rate) / n));
}

TEST_CASE("same seed, same bytes") {
  GenConfig cfg;
  cfg.n_transactions = 3000;
  CHECK(as_csv(generate(cfg)) == as_csv(generate(cfg)));
  GenConfig other = cfg;
  other.seed = cfg.seed + 1;
  CHECK(as_csv(generate(cfg)) != as_csv(generate(other)));
}

TEST_CASE("hot merchants attract fraud") {
  const GenConfig cfg;
  const auto rows = generate(cfg);
  const auto hot_list = hot_merchants(cfg);
  const std::set<std::int64_t> hot(hot_list.begin(), hot_list.end());
  CHECK(hot.size() == 5);

  // Count straight from the emitted rows.
  std::size_t frauds = 0, on_hot = 0;
  for (const auto& r : rows) {
    if (!r.is_fraud) continue;
    ++frauds;
    on_hot += hot.count(r.merchant_name);
  }
  REQUIRE(frauds > 0);
  const double share = static_cast<double>(on_hot) / static_cast<double>(frauds);
  const double null_sd = std::sqrt(0.1 * 0.9 / static_cast<double>(frauds));
  CHECK(share > 0.1 + 4 * null_sd);
}

TEST_CASE("every entity appears and fields stay in domain") {
  const GenConfig cfg;
  const auto rows = generate(cfg);
  REQUIRE(rows.size() == cfg.n_transactions);
  std::set<std::string> cards;
  std::set<std::int64_t> merchants;
  for (const auto& r : rows) {
    cards.insert(r.card_id);
    merchants.insert(r.merchant_name);
    CHECK(r.month >= 1);
    CHECK(r.month <= 12);
    CHECK(r.day >= 1);
    CHECK(r.day <= 31);
    CHECK(r.hour >= 0);
    CHECK(r.hour <= 23);
    CHECK(r.minute >= 0);
    CHECK(r.minute <= 59);
    CHECK(r.amount != 0.0);
    CHECK_FALSE(r.use_chip.empty());
    CHECK_FALSE(r.merchant_city.empty());
    CHECK(r.mcc > 0);
  }
  CHECK(cards.size() == cfg.n_cards);
  CHECK(merchants.size() == cfg.n_merchants);
}

TEST_CASE("fraud clusters late at night") {
  const auto rows = generate(GenConfig{});
  std::size_t fraud = 0, fraud_night = 0, legit = 0, legit_night = 0;
  for (const auto& r : rows) {
    const bool night = r.hour < 5;
    if (r.is_fraud) {
      ++fraud;
      fraud_night += night;
    } else {
      ++legit;
      legit_night += night;
    }
  }
  CHECK(static_cast<double>(fraud_night) / fraud > 0.8);
  CHECK(static_cast<double>(legit_night) / legit < 0.05);
}

TEST_CASE("config validation") {
  GenConfig c;
  c.n_cards = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.fraud_rate = 0.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.fraud_rate = 1.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.n_transactions = 50;
  c.fraud_rate = 0.01;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  CHECK_THROWS_AS(generate(c), std::invalid_argument);
}

TEST_CASE("toy corpus shape") {
  const auto toy = toy_corpus();
  CHECK(toy.size() == 8);
  std::set<std::string> cards;
  std::set<std::int64_t> merchants;
  for (const auto& r : toy) {
    cards.insert(r.card_id);
    merchants.insert(r.merchant_name);
  }
  CHECK(cards.size() + merchants.size() == 6);
  CHECK(fraud_count(toy) > 0);
  CHECK(fraud_count(toy) < toy.size());
}

}
