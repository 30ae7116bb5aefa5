#include "fraudgraph/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <unordered_map>

namespace fraudgraph {

ParseError::ParseError(std::size_t line, std::string column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) +
                         (column.empty() ? std::string() : ": column " + column) + ": " + what),
      line_(line),
      column_(std::move(column)) {}

namespace {

enum Column : std::size_t {
  kYear, kMonth, kDay, kAmount, kUseChip, kMerchantName, kMerchantCity, kMerchantState,
  kZip, kMcc, kErrors, kIsFraud, kCardId, kHour, kMinute, kColumnCount
};
static_assert(kColumnCount == kTransactionColumns.size());

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Throws a bare message; the row loop attaches line and column.
struct FieldError {
  std::string message;
};

template <typename Int>
Int parse_integer(std::string_view raw, Int lo, Int hi) {
  const auto text = trim(raw);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw FieldError{"cannot parse '" + std::string(raw) + "' as integer"};
  }
  if (value < lo || value > hi) {
    throw FieldError{"value " + std::to_string(value) + " outside [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]"};
  }
  return value;
}

double parse_real(std::string_view raw, std::string_view what) {
  auto text = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw FieldError{"cannot parse '" + std::string(raw) + "' as " + std::string(what)};
  }
  return value;
}

// Accepts "12.34", "$12.34", "$-12.34" and "-$12.34".
double parse_amount(std::string_view raw) {
  std::string text(trim(raw));
  bool negate = false;
  if (text.size() >= 2 && text[0] == '-' && text[1] == '$') {
    negate = true;
    text.erase(0, 2);
  } else if (!text.empty() && text[0] == '$') {
    text.erase(0, 1);
  }
  const double value = parse_real(text, "amount");
  return negate ? -value : value;
}

std::optional<std::int32_t> parse_zip(std::string_view raw) {
  const auto text = trim(raw);
  if (text.empty()) return std::nullopt;
  const double value = parse_real(text, "zip");
  if (value < 0.0 || value > 2147483647.0 || std::floor(value) != value) {
    throw FieldError{"zip '" + std::string(raw) + "' is not a non-negative integer"};
  }
  return static_cast<std::int32_t>(value);
}

bool parse_label(std::string_view raw) {
  const std::string token = lower(trim(raw));
  if (token == "yes") return true;
  if (token == "no") return false;
  throw FieldError{"label '" + std::string(raw) + "' is not Yes/No"};
}

TransactionRecord parse_row(const std::vector<std::string>& fields,
                            const std::array<std::size_t, kColumnCount>& index,
                            std::size_t line) {
  TransactionRecord rec;
  std::size_t current = kYear;
  auto field = [&](Column c) -> const std::string& {
    current = c;
    return fields[index[c]];
  };
  try {
    rec.year = parse_integer<int>(field(kYear), 0, 9999);
    rec.month = parse_integer<int>(field(kMonth), 1, 12);
    rec.day = parse_integer<int>(field(kDay), 1, 31);
    rec.amount = parse_amount(field(kAmount));
    rec.use_chip = std::string(trim(field(kUseChip)));
    rec.merchant_name = parse_integer<std::int64_t>(field(kMerchantName), INT64_MIN, INT64_MAX);
    rec.merchant_city = std::string(trim(field(kMerchantCity)));
    rec.merchant_state = std::string(trim(field(kMerchantState)));
    rec.zip = parse_zip(field(kZip));
    rec.mcc = parse_integer<std::int32_t>(field(kMcc), 0, INT32_MAX);
    rec.errors = std::string(trim(field(kErrors)));
    rec.is_fraud = parse_label(field(kIsFraud));
    rec.card_id = std::string(trim(field(kCardId)));
    if (rec.card_id.empty()) throw FieldError{"card_id is empty"};
    rec.hour = parse_integer<int>(field(kHour), 0, 23);
    rec.minute = parse_integer<int>(field(kMinute), 0, 59);
  } catch (const FieldError& e) {
    throw ParseError(line, kTransactionColumns[current], e.message);
  }
  return rec;
}

// Reads one CSV record, joining physical lines while a quote is open.
// Returns false at end of input. `line` is advanced by the lines consumed.
bool read_record(std::istream& in, std::string& record, std::size_t& line) {
  record.clear();
  std::string physical;
  bool open_quote = false;
  bool any = false;
  while (std::getline(in, physical)) {
    ++line;
    if (!physical.empty() && physical.back() == '\r') physical.pop_back();
    if (any) record.push_back('\n');
    record += physical;
    any = true;
    for (char c : physical)
      if (c == '"') open_quote = !open_quote;
    if (!open_quote) return true;
  }
  return any;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

ParseResult parse_transactions(std::istream& source, bool strict) {
  ParseResult result;
  std::size_t line = 0;
  std::string record;
  if (!read_record(source, record, line)) throw ParseError(1, "", "missing header row");
  if (record.size() >= 3 && record.compare(0, 3, "\xEF\xBB\xBF") == 0) record.erase(0, 3);

  const auto header = split_csv_line(record);
  std::array<std::size_t, kColumnCount> index;
  index.fill(SIZE_MAX);
  for (std::size_t h = 0; h < header.size(); ++h) {
    const auto name = trim(header[h]);
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      if (name == kTransactionColumns[c]) {
        if (index[c] != SIZE_MAX) throw ParseError(1, std::string(name), "duplicate column");
        index[c] = h;
      }
    }
  }
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (index[c] == SIZE_MAX) {
      throw ParseError(1, kTransactionColumns[c], "missing mandatory column");
    }
  }

  std::size_t start = 0;
  while (true) {
    start = line + 1;
    if (!read_record(source, record, line)) break;
    if (trim(record).empty()) continue;
    try {
      const auto fields = split_csv_line(record);
      if (fields.size() != header.size()) {
        throw ParseError(start, "", "expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
      }
      result.records.push_back(parse_row(fields, index, start));
    } catch (const ParseError&) {
      if (strict) throw;
      ++result.skipped_rows;
    }
  }
  return result;
}

ParseResult parse_transactions_file(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_transactions(in, strict);
}

void write_transactions(std::ostream& out, std::span<const TransactionRecord> records) {
  for (std::size_t c = 0; c < kTransactionColumns.size(); ++c) {
    out << (c ? "," : "") << kTransactionColumns[c];
  }
  out << '\n';
  char amount[64];
  for (const auto& r : records) {
    // Shortest representation that parses back to the same double.
    const auto res = std::to_chars(amount, amount + sizeof amount, r.amount);
    out << r.year << ',' << r.month << ',' << r.day << ",$"
        << std::string_view(amount, static_cast<std::size_t>(res.ptr - amount)) << ','
        << csv_escape(r.use_chip) << ',' << r.merchant_name << ',' << csv_escape(r.merchant_city)
        << ',' << csv_escape(r.merchant_state) << ',';
    if (r.zip) out << *r.zip;
    out << ',' << r.mcc << ',' << csv_escape(r.errors) << ',' << (r.is_fraud ? "Yes" : "No")
        << ',' << csv_escape(r.card_id) << ',' << r.hour << ',' << r.minute << '\n';
  }
}

std::uint64_t stable_hash(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x100000001b3ULL);
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // Final avalanche so low bits are usable for small bucket counts.
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

std::size_t encoded_width(const EncoderConfig& config) {
  return 1 + 8 + FeatureEncoder::kChipSlots + config.city_buckets + config.state_buckets +
         config.zip_buckets + config.mcc_buckets + config.errors_buckets + 1;
}

double signed_log_amount(double amount) {
  return std::copysign(std::log1p(std::abs(amount)), amount);
}

FeatureEncoder fit_encoder(std::span<const TransactionRecord> train_records,
                           const EncoderConfig& config) {
  if (train_records.empty()) throw std::invalid_argument("fit_encoder: empty training set");
  FeatureEncoder enc;
  enc.config = config;

  const auto n = static_cast<double>(train_records.size());
  double sum = 0.0;
  for (const auto& r : train_records) sum += signed_log_amount(r.amount);
  enc.amount_mean = sum / n;
  double sq = 0.0;
  for (const auto& r : train_records) {
    const double d = signed_log_amount(r.amount) - enc.amount_mean;
    sq += d * d;
  }
  enc.amount_std = std::sqrt(sq / n);
  if (!(enc.amount_std > 0.0)) enc.amount_std = 1.0;

  std::map<std::string, std::size_t> chip_counts;
  for (const auto& r : train_records)
    if (!r.use_chip.empty()) ++chip_counts[r.use_chip];
  std::vector<std::pair<std::string, std::size_t>> ranked(chip_counts.begin(), chip_counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; i < ranked.size() && i < FeatureEncoder::kChipSlots; ++i) {
    enc.chip_categories.push_back(ranked[i].first);
  }
  enc.feature_dim = encoded_width(config);
  return enc;
}

namespace {

void cyclic(std::span<double> out, std::size_t slot, double value, double period) {
  const double angle = 2.0 * std::numbers::pi * value / period;
  out[slot] = std::sin(angle);
  out[slot + 1] = std::cos(angle);
}

// Marks one bucket inside [offset, offset + buckets); empty text leaves the block zero.
void hashed(std::span<double> out, std::size_t offset, std::size_t buckets, std::string_view text,
            std::uint64_t seed) {
  if (buckets == 0 || text.empty()) return;
  out[offset + stable_hash(text, seed) % buckets] = 1.0;
}

}  // namespace

void encode_edge_features_into(const TransactionRecord& r, const FeatureEncoder& enc,
                               std::span<double> out) {
  if (out.size() != enc.feature_dim || enc.feature_dim != encoded_width(enc.config)) {
    throw std::invalid_argument("encode_edge_features: encoder not fitted or width mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  out[0] = (signed_log_amount(r.amount) - enc.amount_mean) / enc.amount_std;
  cyclic(out, 1, r.month - 1, 12.0);
  cyclic(out, 3, r.day - 1, 31.0);
  cyclic(out, 5, r.hour, 24.0);
  cyclic(out, 7, r.minute, 60.0);
  for (std::size_t i = 0; i < enc.chip_categories.size(); ++i) {
    if (r.use_chip == enc.chip_categories[i]) out[9 + i] = 1.0;
  }

  const auto& cfg = enc.config;
  std::size_t offset = 9 + FeatureEncoder::kChipSlots;
  hashed(out, offset, cfg.city_buckets, r.merchant_city, cfg.hash_seed + 1);
  offset += cfg.city_buckets;
  hashed(out, offset, cfg.state_buckets, r.merchant_state, cfg.hash_seed + 2);
  offset += cfg.state_buckets;
  if (r.zip) hashed(out, offset, cfg.zip_buckets, std::to_string(*r.zip), cfg.hash_seed + 3);
  offset += cfg.zip_buckets;
  hashed(out, offset, cfg.mcc_buckets, std::to_string(r.mcc), cfg.hash_seed + 4);
  offset += cfg.mcc_buckets;
  hashed(out, offset, cfg.errors_buckets, r.errors, cfg.hash_seed + 5);
  offset += cfg.errors_buckets;
  out[offset] = r.errors.empty() ? 0.0 : 1.0;
}

std::vector<double> encode_edge_features(const TransactionRecord& record,
                                         const FeatureEncoder& encoder) {
  std::vector<double> out(encoder.feature_dim);
  encode_edge_features_into(record, encoder, out);
  return out;
}

}  // namespace fraudgraph
