#include "catmap/store.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace catmap {

using json = nlohmann::ordered_json;

Format parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw Error(Errc::InvalidArgument, "format must be csv or json, got " + std::string(s));
}

std::string_view to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

const std::vector<Column>& schema(std::string_view kind) {
  using T = ColumnType;
  static const std::vector<Column> primes{
      {"p", T::U64}, {"chi", T::I64}, {"ord", T::U64}, {"class", T::Str}, {"exceeds", T::Bool}};
  static const std::vector<Column> integers{
      {"N", T::U64},  {"d", T::U64},  {"s", T::U64},  {"d0", T::U64},   {"L", T::U64},
      {"ord", T::U64}, {"lower_bound", T::U64}, {"NG", T::U64}, {"NB", T::U64}, {"NT", T::U64},
      {"in_S", T::Bool}, {"omega", T::I64}, {"ord_over_sqrtN", T::F64}};
  static const std::vector<Column> small_order{
      {"k", T::U64},       {"N_k", T::U64},       {"ord", T::U64},         {"ord_over_log", T::F64},
      {"det", T::Str},     {"assembled", T::U64}, {"certified", T::Bool}, {"bounds_hold", T::Bool},
      {"status", T::Str}};
  static const std::vector<Column> sweep{
      {"N", T::U64},        {"n1", T::I64},     {"n2", T::I64},    {"S4", T::F64},
      {"bound", T::F64},    {"ratio", T::F64},  {"variance", T::F64}, {"max_dev", T::F64},
      {"rstar", T::U64},    {"ms", T::F64},     {"holds", T::Bool}, {"error", T::Str}};
  if (kind == "primes") return primes;
  if (kind == "integers") return integers;
  if (kind == "small-order") return small_order;
  if (kind == "sweep") return sweep;
  throw Error(Errc::SchemaMismatch, "unknown record kind '" + std::string(kind) + "'");
}

std::string format_double17(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

namespace {

constexpr std::string_view kMagic = "#catmap-census v";

std::string encode_value(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '%') out += "%25";
    else if (c == ';') out += "%3B";
    else if (c == '\n') out += "%0A";
    else out += c;
  }
  return out;
}

std::string decode_value(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      std::string_view code = s.substr(i + 1, 2);
      if (code == "25") out += '%';
      else if (code == "3B") out += ';';
      else if (code == "0A") out += '\n';
      else throw Error(Errc::SchemaMismatch, "bad escape in header");
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string csv_field(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, bool>) {
          return x ? "1" : "0";
        } else if constexpr (std::is_same_v<X, double>) {
          return format_double17(x);
        } else if constexpr (std::is_same_v<X, std::string>) {
          if (x.find_first_of(",\"\n\r") == std::string::npos) return x;
          std::string q = "\"";
          for (char c : x) {
            if (c == '"') q += '"';
            q += c;
          }
          return q + "\"";
        } else {
          return std::to_string(x);
        }
      },
      v);
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(Errc::IoError, "unterminated quote in row");
  out.push_back(std::move(cur));
  return out;
}

template <class T>
T parse_int(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error(Errc::IoError, "bad integer field '" + std::string(s) + "'");
  return v;
}

Value parse_field(std::string_view s, ColumnType type) {
  switch (type) {
    case ColumnType::U64: return parse_int<u64>(s);
    case ColumnType::I64: return parse_int<i64>(s);
    case ColumnType::F64: {
      double v{};
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error(Errc::IoError, "bad float field '" + std::string(s) + "'");
      return v;
    }
    case ColumnType::Bool:
      if (s == "1") return true;
      if (s == "0") return false;
      throw Error(Errc::IoError, "bad boolean field '" + std::string(s) + "'");
    case ColumnType::Str: return std::string(s);
  }
  return std::string(s);
}

json value_json(const Value& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

Value json_value(const json& j, ColumnType type) {
  switch (type) {
    case ColumnType::U64: return j.get<u64>();
    case ColumnType::I64: return j.get<i64>();
    case ColumnType::F64: return j.get<double>();
    case ColumnType::Bool: return j.get<bool>();
    case ColumnType::Str: return j.get<std::string>();
  }
  return std::string();
}

void check_row_shape(const std::string& kind, const Row& row) {
  const auto& cols = schema(kind);
  if (row.size() != cols.size()) throw Error(Errc::SchemaMismatch, "row width does not match kind " + kind);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (row[i].index() != static_cast<std::size_t>(cols[i].type)) {
      throw Error(Errc::SchemaMismatch, "column " + cols[i].name + " has the wrong type");
    }
  }
}

struct Parsed {
  Table table;
  Format format;
  std::size_t complete_bytes;  // length of the prefix made of whole lines
};

Parsed parse_store(const std::string& content) {
  Parsed out{};
  std::size_t end = content.rfind('\n');
  out.complete_bytes = end == std::string::npos ? 0 : end + 1;
  std::vector<std::string_view> lines;
  std::string_view body(content.data(), out.complete_bytes);
  while (!body.empty()) {
    std::size_t nl = body.find('\n');
    lines.push_back(body.substr(0, nl));
    body.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw Error(Errc::SchemaMismatch, "store has no header");
  Table& t = out.table;
  std::size_t first_row;
  if (lines[0].starts_with(kMagic)) {
    out.format = Format::Csv;
    std::string_view head = lines[0].substr(kMagic.size());
    std::size_t semi = head.find(';');
    if (parse_int<int>(head.substr(0, semi)) != kStoreVersion) throw Error(Errc::SchemaMismatch, "unsupported store version");
    head = semi == std::string_view::npos ? std::string_view{} : head.substr(semi + 1);
    bool first = true;
    while (!head.empty()) {
      if (head.front() == ' ') head.remove_prefix(1);
      std::size_t next = head.find(';');
      std::string_view item = head.substr(0, next);
      head = next == std::string_view::npos ? std::string_view{} : head.substr(next + 1);
      std::size_t eq = item.find('=');
      if (eq == std::string_view::npos) throw Error(Errc::SchemaMismatch, "malformed header item");
      std::string key(item.substr(0, eq));
      std::string value = decode_value(item.substr(eq + 1));
      if (first) {
        if (key != "kind") throw Error(Errc::SchemaMismatch, "header must start with kind");
        t.kind = value;
        first = false;
      } else {
        t.config.emplace_back(key, value);
      }
    }
    if (lines.size() < 2) throw Error(Errc::SchemaMismatch, "store has no column line");
    const auto& cols = schema(t.kind);
    auto names = split_csv(lines[1]);
    if (names.size() != cols.size()) throw Error(Errc::SchemaMismatch, "column line does not match kind " + t.kind);
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (names[i] != cols[i].name) throw Error(Errc::SchemaMismatch, "column " + names[i] + " unexpected");
    first_row = 2;
    for (std::size_t i = first_row; i < lines.size(); ++i) {
      auto fields = split_csv(lines[i]);
      if (fields.size() != cols.size()) throw Error(Errc::IoError, "row " + std::to_string(i + 1) + " has the wrong width");
      Row row;
      for (std::size_t c = 0; c < cols.size(); ++c) row.push_back(parse_field(fields[c], cols[c].type));
      t.rows.push_back(std::move(row));
    }
  } else if (lines[0].starts_with("{")) {
    out.format = Format::Json;
    json head;
    try {
      head = json::parse(lines[0]);
    } catch (const json::exception& e) {
      throw Error(Errc::SchemaMismatch, std::string("bad header: ") + e.what());
    }
    if (!head.contains("catmap-census") || head["catmap-census"] != kStoreVersion) {
      throw Error(Errc::SchemaMismatch, "unsupported store version");
    }
    t.kind = head.value("kind", "");
    const auto& cols = schema(t.kind);
    for (const auto& [k, v] : head["config"].items()) t.config.emplace_back(k, v.get<std::string>());
    std::vector<std::string> names = head.value("columns", std::vector<std::string>{});
    if (names.size() != cols.size()) throw Error(Errc::SchemaMismatch, "column list does not match kind " + t.kind);
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (names[i] != cols[i].name) throw Error(Errc::SchemaMismatch, "column " + names[i] + " unexpected");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      try {
        json j = json::parse(lines[i]);
        Row row;
        for (const auto& c : cols) row.push_back(json_value(j.at(c.name), c.type));
        t.rows.push_back(std::move(row));
      } catch (const json::exception& e) {
        throw Error(Errc::IoError, "row " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  } else {
    throw Error(Errc::SchemaMismatch, "not a catmap-census store");
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string header_text(const Table& t, Format f) {
  const auto& cols = schema(t.kind);
  std::string out;
  if (f == Format::Csv) {
    out = std::string(kMagic) + std::to_string(kStoreVersion) + "; kind=" + encode_value(t.kind);
    for (const auto& [k, v] : t.config) out += "; " + k + "=" + encode_value(v);
    out += "\n";
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i].name;
    out += "\n";
  } else {
    json head;
    head["catmap-census"] = kStoreVersion;
    head["kind"] = t.kind;
    json config = json::object();
    for (const auto& [k, v] : t.config) config[k] = v;
    head["config"] = config;
    json names = json::array();
    for (const auto& c : cols) names.push_back(c.name);
    head["columns"] = names;
    out = head.dump() + "\n";
  }
  return out;
}

std::string row_text(const std::string& kind, const Row& row, Format f) {
  check_row_shape(kind, row);
  const auto& cols = schema(kind);
  std::string out;
  if (f == Format::Csv) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
  } else {
    json j;
    for (std::size_t i = 0; i < row.size(); ++i) j[cols[i].name] = value_json(row[i]);
    out = j.dump();
  }
  return out + "\n";
}

void store_results(const Table& t, const std::filesystem::path& path, Format f) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << header_text(t, f);
  for (const auto& row : t.rows) out << row_text(t.kind, row, f);
  if (!out.flush()) throw Error(Errc::IoError, "write failed for " + path.string());
}

Table load_results(const std::filesystem::path& path, Format* detected) {
  Parsed p = parse_store(read_file(path));
  if (detected) *detected = p.format;
  return std::move(p.table);
}

std::optional<Table> resume_results(const std::filesystem::path& path, const std::string& kind,
                                    const Config& config, Format f) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  const std::string content = read_file(path);
  Parsed p = parse_store(content);
  if (p.format != f) throw Error(Errc::SchemaMismatch, path.string() + " is stored as " + std::string(to_string(p.format)));
  if (p.table.kind != kind) throw Error(Errc::SchemaMismatch, path.string() + " holds kind " + p.table.kind);
  if (p.table.config != config) throw Error(Errc::SchemaMismatch, path.string() + " was written with a different configuration");
  if (p.complete_bytes != content.size()) {
    std::filesystem::resize_file(path, p.complete_bytes, ec);
    if (ec) throw Error(Errc::IoError, "cannot truncate " + path.string() + ": " + ec.message());
  }
  return std::move(p.table);
}

void append_rows(const std::filesystem::path& path, const std::string& kind, const std::vector<Row>& rows, Format f) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(Errc::IoError, "cannot append to " + path.string());
  for (const auto& row : rows) out << row_text(kind, row, f);
  if (!out.flush()) throw Error(Errc::IoError, "write failed for " + path.string());
}

u64 row_key(const Row& row) {
  if (row.empty()) throw Error(Errc::SchemaMismatch, "empty row");
  return std::get<u64>(row[0]);
}

// --- records ---------------------------------------------------------------

Row to_row(const PrimeRecord& r) {
  return {r.p, static_cast<i64>(r.chi), r.ord, std::string(to_string(r.cls)), r.exceeds};
}

Row to_row(const IntegerRecord& r) {
  return {r.N, r.d, r.s, r.d0, r.L, r.ord, r.lower_bound, r.NG, r.NB, r.NT, r.in_S, static_cast<i64>(r.omega),
          r.ord_over_sqrtN};
}

Row to_row(const SmallOrderRow& r) {
  return {static_cast<u64>(r.k), r.n_k, r.ord, r.ord_over_log, r.det, r.assembled, r.certified, r.bounds_hold, r.status};
}

Row to_row(const SweepRecord& r) {
  return {r.N, r.n1, r.n2, r.S4, r.bound, r.ratio, r.variance, r.max_dev, r.rstar, r.ms, r.holds, r.error};
}

namespace {

PrimeClass parse_class(const std::string& s) {
  if (s == "good") return PrimeClass::Good;
  if (s == "bad") return PrimeClass::Bad;
  if (s == "terrible") return PrimeClass::Terrible;
  throw Error(Errc::IoError, "unknown prime class '" + s + "'");
}

}  // namespace

PrimeRecord prime_record_from(const Row& row) {
  check_row_shape("primes", row);
  PrimeRecord r;
  r.p = std::get<u64>(row[0]);
  r.chi = static_cast<int>(std::get<i64>(row[1]));
  r.ord = std::get<u64>(row[2]);
  r.cls = parse_class(std::get<std::string>(row[3]));
  r.exceeds = std::get<bool>(row[4]);
  return r;
}

IntegerRecord integer_record_from(const Row& row) {
  check_row_shape("integers", row);
  IntegerRecord r;
  r.N = std::get<u64>(row[0]);
  r.d = std::get<u64>(row[1]);
  r.s = std::get<u64>(row[2]);
  r.d0 = std::get<u64>(row[3]);
  r.L = std::get<u64>(row[4]);
  r.ord = std::get<u64>(row[5]);
  r.lower_bound = std::get<u64>(row[6]);
  r.NG = std::get<u64>(row[7]);
  r.NB = std::get<u64>(row[8]);
  r.NT = std::get<u64>(row[9]);
  r.in_S = std::get<bool>(row[10]);
  r.omega = static_cast<int>(std::get<i64>(row[11]));
  r.ord_over_sqrtN = std::get<double>(row[12]);
  return r;
}

SmallOrderRow small_order_row_from(const Row& row) {
  check_row_shape("small-order", row);
  SmallOrderRow r;
  r.k = static_cast<int>(std::get<u64>(row[0]));
  r.n_k = std::get<u64>(row[1]);
  r.ord = std::get<u64>(row[2]);
  r.ord_over_log = std::get<double>(row[3]);
  r.det = std::get<std::string>(row[4]);
  r.assembled = std::get<u64>(row[5]);
  r.certified = std::get<bool>(row[6]);
  r.bounds_hold = std::get<bool>(row[7]);
  r.status = std::get<std::string>(row[8]);
  return r;
}

SweepRecord sweep_record_from(const Row& row) {
  check_row_shape("sweep", row);
  SweepRecord r;
  r.N = std::get<u64>(row[0]);
  r.n1 = std::get<i64>(row[1]);
  r.n2 = std::get<i64>(row[2]);
  r.S4 = std::get<double>(row[3]);
  r.bound = std::get<double>(row[4]);
  r.ratio = std::get<double>(row[5]);
  r.variance = std::get<double>(row[6]);
  r.max_dev = std::get<double>(row[7]);
  r.rstar = std::get<u64>(row[8]);
  r.ms = std::get<double>(row[9]);
  r.holds = std::get<bool>(row[10]);
  r.error = std::get<std::string>(row[11]);
  return r;
}

// --- JSON documents --------------------------------------------------------

json to_json(const PrimeSummary& s) {
  json j;
  j["x"] = s.x;
  j["eta"] = s.eta;
  j["primes"] = s.primes;
  j["exceeding"] = s.exceeding;
  j["fraction"] = s.fraction;
  j["c_eta"] = s.c_eta;
  j["classes"] = {{"good", s.class_counts[0]}, {"bad", s.class_counts[1]}, {"terrible", s.class_counts[2]}};
  json tails = json::array();
  for (const auto& t : s.tails) {
    tails.push_back({{"exponent", t.exponent}, {"y", t.y}, {"count", t.count}, {"y_squared", t.y_squared}});
  }
  j["tails"] = tails;
  return j;
}

json to_json(const IntegerSummary& s) {
  json j;
  j["x"] = s.x;
  j["eta"] = s.eta;
  j["skipped_N1"] = s.skipped_one;
  j["delta_grid"] = s.delta_grid;
  json cps = json::array();
  for (const auto& c : s.checkpoints) {
    cps.push_back({{"x", c.x},
                   {"count", c.count},
                   {"ord_above_sqrtN", c.ord_above_sqrt},
                   {"square_part_above_logN", c.square_part},
                   {"omega_above_threshold", c.many_factors},
                   {"all_primes_bad", c.all_bad},
                   {"in_S", c.in_S},
                   {"delta_fractions", c.delta_fractions}});
  }
  j["checkpoints"] = cps;
  json L = json::array();
  for (const auto& [value, count] : s.L_distribution) L.push_back({value, count});
  j["L_distribution"] = L;
  j["bound_violations"] = s.bound_violations;
  j["split_violations"] = s.split_violations;
  return j;
}

json operator_to_json(const Operator& U) {
  json j;
  j["N"] = U.rows();
  j["layout"] = "row-major";
  json entries = json::array();
  for (Eigen::Index r = 0; r < U.rows(); ++r)
    for (Eigen::Index c = 0; c < U.cols(); ++c) entries.push_back({U(r, c).real(), U(r, c).imag()});
  j["entries"] = entries;
  return j;
}

Operator operator_from_json(const json& j) {
  const Eigen::Index n = j.at("N").get<Eigen::Index>();
  const auto& entries = j.at("entries");
  if (static_cast<Eigen::Index>(entries.size()) != n * n) throw Error(Errc::SchemaMismatch, "operator entry count");
  Operator U(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = entries[static_cast<std::size_t>(r * n + c)];
      U(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  return U;
}

json spectrum_to_json(const Spectrum& s) {
  json j;
  j["N"] = s.N;
  j["rstar"] = s.rstar;
  j["phase"] = s.phase;
  j["max_residual"] = s.max_residual;
  j["orthonormality_defect"] = s.orthonormality_defect;
  json spaces = json::array();
  for (const auto& e : s.spaces) {
    json basis = json::array();
    for (Eigen::Index r = 0; r < e.basis.rows(); ++r)
      for (Eigen::Index c = 0; c < e.basis.cols(); ++c) basis.push_back({e.basis(r, c).real(), e.basis(r, c).imag()});
    spaces.push_back({{"index", e.index},
                      {"eigenphase", {e.eigenvalue.real(), e.eigenvalue.imag()}},
                      {"multiplicity", e.multiplicity},
                      {"basis", basis}});
  }
  j["eigenspaces"] = spaces;
  return j;
}

}  // namespace catmap
