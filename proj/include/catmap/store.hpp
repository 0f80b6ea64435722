#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "catmap/census.hpp"

namespace catmap {

enum class Format { Csv, Json };
Format parse_format(std::string_view s);
std::string_view to_string(Format f);

enum class ColumnType { U64, I64, F64, Bool, Str };
struct Column {
  std::string name;
  ColumnType type;
};

using Value = std::variant<u64, i64, double, bool, std::string>;
using Row = std::vector<Value>;

/// Ordered key/value pairs; the order is part of the byte layout.
using Config = std::vector<std::pair<std::string, std::string>>;

constexpr int kStoreVersion = 1;

/// Known kinds: "primes", "integers", "small-order", "sweep".
const std::vector<Column>& schema(std::string_view kind);

struct Table {
  std::string kind;
  Config config;
  std::vector<Row> rows;
  friend bool operator==(const Table&, const Table&) = default;
};

/// 17 significant digits; parses back to the same double.
std::string format_double17(double v);

std::string header_text(const Table& t, Format f);
std::string row_text(const std::string& kind, const Row& row, Format f);

/// Writes header and rows, replacing any existing file. Throws IoError.
void store_results(const Table& t, const std::filesystem::path& path, Format f);
/// Format is detected from the first byte. An unterminated last line is
/// treated as a torn write and dropped. Throws IoError, SchemaMismatch.
Table load_results(const std::filesystem::path& path, Format* detected = nullptr);

/// Opens an existing store for appending: drops a torn last line, checks
/// that kind, version, config and format match, and returns what is there.
/// Returns nullopt when the file does not exist.
std::optional<Table> resume_results(const std::filesystem::path& path, const std::string& kind,
                                    const Config& config, Format f);
void append_rows(const std::filesystem::path& path, const std::string& kind, const std::vector<Row>& rows, Format f);

/// Key of a row: its first column.
u64 row_key(const Row& row);

Row to_row(const PrimeRecord& r);
Row to_row(const IntegerRecord& r);
Row to_row(const SmallOrderRow& r);
Row to_row(const SweepRecord& r);
PrimeRecord prime_record_from(const Row& row);
IntegerRecord integer_record_from(const Row& row);
SmallOrderRow small_order_row_from(const Row& row);
SweepRecord sweep_record_from(const Row& row);

nlohmann::ordered_json to_json(const PrimeSummary& s);
nlohmann::ordered_json to_json(const IntegerSummary& s);
/// {"N", "layout": "row-major", "entries": [[re, im], ...]}.
nlohmann::ordered_json operator_to_json(const Operator& U);
/// Eigenphases as [cos, sin]; bases N x m row-major as [re, im] pairs.
nlohmann::ordered_json spectrum_to_json(const Spectrum& s);
Operator operator_from_json(const nlohmann::ordered_json& j);

}  // namespace catmap
