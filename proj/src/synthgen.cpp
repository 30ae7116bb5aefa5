#include "fraudgraph/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "fraudgraph/numerics.hpp"

namespace fraudgraph {

void validate(const GenConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("gen config: " + what); };
  if (c.n_cards < 1) fail("n_cards must be >= 1");
  if (c.n_merchants < 1) fail("n_merchants must be >= 1");
  if (c.n_transactions < 1) fail("n_transactions must be >= 1");
  if (!(c.fraud_rate > 0.0 && c.fraud_rate < 1.0)) fail("fraud_rate must be in (0, 1)");
  if (c.fraud_rate * static_cast<double>(c.n_transactions) < 1.0) {
    fail("expected fraud count fraud_rate * n_transactions must be >= 1");
  }
  if (!(c.hot_merchant_fraction > 0.0 && c.hot_merchant_fraction <= 1.0)) {
    fail("hot_merchant_fraction must be in (0, 1]");
  }
  if (!(c.pattern_strength >= 0.0)) fail("pattern_strength must be >= 0");
}

namespace {

struct Place {
  const char* city;
  const char* state;
  std::int32_t zip_base;
};

constexpr std::array<Place, 16> kPlaces = {{
    {"La Verne", "CA", 91750}, {"Monterey Park", "CA", 91754}, {"Houston", "TX", 77001},
    {"Austin", "TX", 73301},   {"Mira Loma", "CA", 91752},     {"Brooklyn", "NY", 11201},
    {"Seattle", "WA", 98101},  {"Miami", "FL", 33101},         {"Chicago", "IL", 60601},
    {"Denver", "CO", 80201},   {"Phoenix", "AZ", 85001},       {"Boston", "MA", 2108},
    {"Atlanta", "GA", 30301},  {"Portland", "OR", 97201},      {"Columbus", "OH", 43004},
    {"Nashville", "TN", 37201},
}};

constexpr std::array<std::int32_t, 14> kMccs = {5300, 5411, 5499, 5812, 5912, 5541, 4829,
                                                5311, 5651, 7538, 4121, 5815, 5970, 3771};

constexpr std::array<const char*, 5> kErrorKinds = {"Insufficient Balance", "Bad PIN",
                                                    "Technical Glitch", "Bad CVV",
                                                    "Bad Expiration"};

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : kDays[static_cast<std::size_t>(month - 1)];
}

struct Merchant {
  std::int64_t name = 0;
  bool online = false;
  bool hot = false;
  const Place* place = nullptr;
  std::int32_t zip = 0;
  std::int32_t mcc = 0;
};

struct Entities {
  std::vector<std::string> cards;
  std::vector<Merchant> merchants;
};

Entities make_entities(const GenConfig& c, Rng& rng) {
  Entities ent;
  for (std::size_t i = 0; i < c.n_cards; ++i) {
    std::string number = "4";
    for (int d = 0; d < 15; ++d) number.push_back(static_cast<char>('0' + rng.below(10)));
    ent.cards.push_back(number + "_u" + std::to_string(i));
  }
  std::set<std::int64_t> used;
  for (std::size_t i = 0; i < c.n_merchants; ++i) {
    Merchant m;
    do {
      m.name = static_cast<std::int64_t>(rng.next_u64());
    } while (!used.insert(m.name).second);
    m.online = rng.bernoulli(0.15);
    m.place = &kPlaces[rng.below(kPlaces.size())];
    m.zip = m.place->zip_base + static_cast<std::int32_t>(rng.below(20));
    m.mcc = kMccs[rng.below(kMccs.size())];
    ent.merchants.push_back(m);
  }
  std::vector<std::size_t> order(c.n_merchants);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  const auto n_hot = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(c.hot_merchant_fraction * static_cast<double>(c.n_merchants) - 1e-9)));
  for (std::size_t i = 0; i < n_hot && i < order.size(); ++i) ent.merchants[order[i]].hot = true;
  return ent;
}

// Every entity shows up once before uniform draws take over.
std::vector<std::size_t> assign(std::size_t n_entities, std::size_t n_transactions, Rng& rng) {
  std::vector<std::size_t> first(n_entities);
  for (std::size_t i = 0; i < n_entities; ++i) first[i] = i;
  rng.shuffle(first);
  std::vector<std::size_t> out(n_transactions);
  for (std::size_t t = 0; t < n_transactions; ++t) {
    out[t] = t < n_entities ? first[t] : rng.below(n_entities);
  }
  return out;
}

}  // namespace

std::vector<TransactionRecord> generate(const GenConfig& c) {
  validate(c);
  Rng rng(c.seed);
  const Entities ent = make_entities(c, rng);
  const auto card_of = assign(c.n_cards, c.n_transactions, rng);
  const auto merchant_of = assign(c.n_merchants, c.n_transactions, rng);

  // Choose per-class fraud probabilities so the expected prevalence matches
  // fraud_rate exactly for the realized hot-merchant share.
  const double s = c.pattern_strength;
  const double risk_ratio = 1.0 + 9.0 * s;
  std::size_t hot_tx = 0;
  for (std::size_t m : merchant_of) hot_tx += ent.merchants[m].hot ? 1 : 0;
  const double n = static_cast<double>(c.n_transactions);
  const double h = static_cast<double>(hot_tx);
  const double p_cold = c.fraud_rate * n / (h * risk_ratio + (n - h));
  const double p_hot = std::min(1.0, risk_ratio * p_cold);

  const double late_night_fraud = std::min(0.97, s);
  const double amount_shift = 7.0 * s;

  std::vector<TransactionRecord> out;
  out.reserve(c.n_transactions);
  for (std::size_t t = 0; t < c.n_transactions; ++t) {
    const Merchant& m = ent.merchants[merchant_of[t]];
    TransactionRecord r;
    r.card_id = ent.cards[card_of[t]];
    r.merchant_name = m.name;
    r.is_fraud = rng.bernoulli(m.hot ? p_hot : p_cold);

    r.year = 2016 + static_cast<int>(rng.below(4));
    r.month = 1 + static_cast<int>(rng.below(12));
    r.day = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(days_in_month(r.year, r.month))));
    if (r.is_fraud && rng.bernoulli(late_night_fraud)) {
      r.hour = static_cast<int>(rng.below(5));
    } else if (rng.bernoulli(0.005)) {
      r.hour = static_cast<int>(rng.below(6));
    } else {
      r.hour = 6 + static_cast<int>(rng.below(18));
    }
    r.minute = static_cast<int>(rng.below(60));

    double log_amount = 3.6 + 0.4 * rng.normal();
    if (r.is_fraud) log_amount = 3.6 + amount_shift + 0.3 * rng.normal();
    auto cents = static_cast<std::int64_t>(std::llround(std::exp(log_amount) * 100.0));
    cents = std::max<std::int64_t>(cents, 1);
    if (!r.is_fraud && rng.bernoulli(0.002)) cents = -cents;  // refund
    r.amount = static_cast<double>(cents) / 100.0;

    if (m.online) {
      r.use_chip = "Online Transaction";
      r.merchant_city = "ONLINE";
    } else {
      r.use_chip = rng.bernoulli(0.65) ? "Chip Transaction" : "Swipe Transaction";
      r.merchant_city = m.place->city;
      r.merchant_state = m.place->state;
      r.zip = m.zip;
    }
    r.mcc = m.mcc;
    if (rng.bernoulli(0.015)) r.errors = kErrorKinds[rng.below(kErrorKinds.size())];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::int64_t> hot_merchants(const GenConfig& config) {
  validate(config);
  Rng rng(config.seed);
  const Entities ent = make_entities(config, rng);
  std::vector<std::int64_t> hot;
  for (const auto& m : ent.merchants)
    if (m.hot) hot.push_back(m.name);
  std::sort(hot.begin(), hot.end());
  return hot;
}

std::vector<TransactionRecord> toy_corpus() {
  auto rec = [](std::string card, std::int64_t merchant, double amount, int hour, bool fraud,
                std::string chip, std::string city, std::string state,
                std::optional<std::int32_t> zip, std::int32_t mcc, std::string errors) {
    TransactionRecord r;
    r.year = 2019;
    r.month = 1 + static_cast<int>(merchant % 12);
    r.day = 3 + hour % 20;
    r.amount = amount;
    r.use_chip = std::move(chip);
    r.merchant_name = merchant;
    r.merchant_city = std::move(city);
    r.merchant_state = std::move(state);
    r.zip = zip;
    r.mcc = mcc;
    r.errors = std::move(errors);
    r.is_fraud = fraud;
    r.card_id = std::move(card);
    r.hour = hour;
    r.minute = (hour * 7) % 60;
    return r;
  };
  return {
      rec("4000111122223333_u0", 101, 24.50, 13, false, "Chip Transaction", "Austin", "TX", 73301, 5411, ""),
      rec("4000111122223333_u0", 202, 310.00, 2, true, "Online Transaction", "ONLINE", "", std::nullopt, 5815, ""),
      rec("4000444455556666_u1", 101, 8.75, 9, false, "Swipe Transaction", "Austin", "TX", 73301, 5411, ""),
      rec("4000444455556666_u1", 303, -15.00, 18, false, "Chip Transaction", "Miami", "FL", 33101, 5812, ""),
      rec("4000777788889999_u2", 202, 455.20, 3, true, "Online Transaction", "ONLINE", "", std::nullopt, 5815, "Bad CVV"),
      rec("4000777788889999_u2", 303, 61.10, 20, false, "Swipe Transaction", "Miami", "FL", 33101, 5812, ""),
      rec("4000111122223333_u0", 303, 42.00, 11, false, "Chip Transaction", "Miami", "FL", 33101, 5812, "Insufficient Balance"),
      rec("4000444455556666_u1", 202, 120.99, 1, true, "Online Transaction", "ONLINE", "", std::nullopt, 5815, ""),
  };
}

}  // namespace fraudgraph
