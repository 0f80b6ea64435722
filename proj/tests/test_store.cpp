#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "catmap/store.hpp"
#include "support.hpp"

using namespace catmap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("catmap-store-" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Table sweep_table(std::size_t n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  Table t{"sweep", {{"matrix", "2,1,3,2"}, {"note", "semi;colon%percent\nline"}}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    SweepRecord r;
    r.N = i + 1;
    r.n1 = -static_cast<i64>(i % 7);
    r.n2 = 3;
    r.S4 = u(rng);
    r.bound = std::ldexp(u(rng), -900);
    r.ratio = 1.0 / 3.0;
    r.variance = 5e-324;
    r.max_dev = u(rng);
    r.rstar = i;
    r.holds = i % 2 == 0;
    r.error = i % 13 == 0 ? "ConstructionFailed: x, \"y\"" : "";
    t.rows.push_back(to_row(r));
  }
  return t;
}

}  // namespace

TEST_CASE("format_double17 round trips") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10'000; ++i) {
    double v;
    const u64 bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string text = format_double17(v);
    double back = 0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("10^4 records round trip bit for bit") {
  TempDir dir;
  const Table t = sweep_table(10'000);
  for (Format f : {Format::Csv, Format::Json}) {
    const fs::path p = dir.path / (f == Format::Csv ? "t.csv" : "t.jsonl");
    store_results(t, p, f);
    Format detected{};
    const Table back = load_results(p, &detected);
    CHECK(detected == f);
    CHECK(back == t);
    store_results(back, dir.path / "again", f);
    CHECK(slurp(p) == slurp(dir.path / "again"));
  }
}

TEST_CASE("empty table is a header only file") {
  TempDir dir;
  const Table t{"primes", {{"x", "100"}}, {}};
  store_results(t, dir.path / "e.csv", Format::Csv);
  const std::string text = slurp(dir.path / "e.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(load_results(dir.path / "e.csv") == t);
}

TEST_CASE("resume after truncation continues at the next record") {
  TempDir dir;
  const Table t = sweep_table(500);
  for (Format f : {Format::Csv, Format::Json}) {
    const fs::path p = dir.path / "r";
    store_results(t, p, f);
    const std::string full = slurp(p);
    // Cut in the middle of record 301.
    std::size_t at = 0;
    const int header_lines = f == Format::Csv ? 2 : 1;
    for (int line = 0; line < header_lines + 300; ++line) at = full.find('\n', at) + 1;
    {
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      out << full.substr(0, at + 5);
    }
    const auto resumed = resume_results(p, t.kind, t.config, f);
    REQUIRE(resumed);
    REQUIRE(resumed->rows.size() == 300);
    CHECK(row_key(resumed->rows.back()) == 300);
    append_rows(p, t.kind, std::vector<Row>(t.rows.begin() + 300, t.rows.end()), f);
    CHECK(slurp(p) == full);
  }
  CHECK_FALSE(resume_results(dir.path / "missing", t.kind, t.config, Format::Csv));
  CHECK(test::error_of([&] { resume_results(dir.path / "r", "primes", t.config, Format::Json); }) ==
        Errc::SchemaMismatch);
}

TEST_CASE("operator JSON round trip") {
  Operator U = Operator::Random(4, 4);
  const Operator back = operator_from_json(operator_to_json(U));
  CHECK(back == U);
}

TEST_CASE("record converters") {
  IntegerRecord r;
  r.N = 360;
  r.d = 10;
  r.s = 6;
  r.in_S = true;
  r.ord_over_sqrtN = 0.1;
  CHECK(integer_record_from(to_row(r)) == r);
  SmallOrderRow s;
  s.k = 40;
  s.det = "75492168629825517411072";
  s.status = "FactorizationTimeout";
  CHECK(small_order_row_from(to_row(s)) == s);
}
