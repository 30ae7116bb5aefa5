#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraudgraph {

/// One transaction row in the card/merchant CSV schema.
struct TransactionRecord {
  int year = 0;
  int month = 1;
  int day = 1;
  double amount = 0.0;  // dollars; negative for refunds
  std::string use_chip;
  std::int64_t merchant_name = 0;
  std::string merchant_city;
  std::string merchant_state;  // empty for online merchants
  std::optional<std::int32_t> zip;
  std::int32_t mcc = 0;
  std::string errors;  // empty when the transaction had no errors
  bool is_fraud = false;
  std::string card_id;
  int hour = 0;
  int minute = 0;

  bool operator==(const TransactionRecord&) const = default;
};

/// Raised for malformed input. `line` is 1-based and counts the header.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string column, const std::string& what);

  std::size_t line() const { return line_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

struct ParseResult {
  std::vector<TransactionRecord> records;
  std::size_t skipped_rows = 0;  // lenient mode only
};

// Column names exactly as they appear in the header row.
inline constexpr std::array<const char*, 15> kTransactionColumns = {
    "Year", "Month", "Day", "Amount", "Use Chip", "Merchant Name", "Merchant City",
    "Merchant State", "Zip", "MCC", "Errors?", "Is Fraud?", "card_id", "Hour", "Minute"};

/// Parses a transaction CSV. Header columns are matched by name in any
/// order; unknown columns (including "Yours") are ignored. Strict mode throws
/// ParseError on the first malformed row, lenient mode skips and counts it.
ParseResult parse_transactions(std::istream& source, bool strict = true);
ParseResult parse_transactions_file(const std::string& path, bool strict = true);

void write_transactions(std::ostream& out, std::span<const TransactionRecord> records);

// RFC 4180 field splitting, shared by the other CSV readers in the project.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);

struct EncoderConfig {
  std::uint64_t hash_seed = 0x5eedf00dULL;
  std::size_t city_buckets = 64;
  std::size_t state_buckets = 16;
  std::size_t zip_buckets = 32;
  std::size_t mcc_buckets = 64;
  std::size_t errors_buckets = 8;

  bool operator==(const EncoderConfig&) const = default;
};

/// Fitted edge-feature encoder. Slot layout, in order:
///   [0]      z-scored sign(a)*ln(1+|a|) amount
///   [1..8]   sin/cos pairs for month, day, hour, minute
///   [9..11]  one-hot "Use Chip" over the three most frequent training values
///   then hashed one-hot blocks for city, state, zip, mcc, errors
///   [last]   errors-present flag
struct FeatureEncoder {
  static constexpr std::size_t kChipSlots = 3;

  double amount_mean = 0.0;
  double amount_std = 1.0;
  EncoderConfig config;
  std::vector<std::string> chip_categories;  // at most kChipSlots
  std::size_t feature_dim = 0;

  bool operator==(const FeatureEncoder&) const = default;
};

std::size_t encoded_width(const EncoderConfig& config);

double signed_log_amount(double amount);

/// Throws std::invalid_argument on an empty training set.
FeatureEncoder fit_encoder(std::span<const TransactionRecord> train_records,
                           const EncoderConfig& config = {});

std::vector<double> encode_edge_features(const TransactionRecord& record,
                                         const FeatureEncoder& encoder);
void encode_edge_features_into(const TransactionRecord& record, const FeatureEncoder& encoder,
                               std::span<double> out);

// Seeded FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed);

}  // namespace fraudgraph
