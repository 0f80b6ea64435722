#include "catmap/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "catmap/checks.hpp"
#include "catmap/store.hpp"

namespace catmap {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string matrix = "2,1,3,2";
  std::string out;
  std::string format = "csv";
  unsigned workers = 0;
  bool resume = false;

  u64 N = 0;
  std::string n = "1,0";
  std::string f;
  std::string path = "auto";
  bool brute = false;
  int k_max = 40;
  u64 x = 100'000;
  double eta = 0.55;
  std::string delta = "0.1,0.2,0.3,0.4,0.5";
  std::string N_list;
  bool primes_only = false;
  u64 dense_limit = 300;
  bool timing = false;
  std::uint64_t seed = 0x5eed5eedULL;
  double tol_spectral = 1e-8;
  double tol_relative = 1e-6;
  bool quick = false;
  std::uint64_t check_seed = 20240601;
  std::string replay_file;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Vec2 parse_vec2(const std::string& s) {
  const auto comma = s.find(',');
  i64 a = 0, b = 0;
  auto bad = [&] { return UsageError("vector must be n1,n2: " + s); };
  if (comma == std::string::npos) throw bad();
  auto r1 = std::from_chars(s.data(), s.data() + comma, a);
  auto r2 = std::from_chars(s.data() + comma + 1, s.data() + s.size(), b);
  if (r1.ec != std::errc{} || r1.ptr != s.data() + comma || r2.ec != std::errc{} || r2.ptr != s.data() + s.size()) {
    throw bad();
  }
  return {a, b};
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v{};
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) throw UsageError("bad number list: " + s);
    out.push_back(v);
  }
  return out;
}

/// "5..60,71,80..90" into a sorted list without repeats.
std::vector<u64> parse_N_list(const std::string& s, bool primes_only) {
  std::vector<u64> out;
  std::stringstream ss(s);
  std::string item;
  auto num = [&](std::string_view t) {
    u64 v{};
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) throw UsageError("bad N list: " + s);
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(num(item));
    } else {
      const u64 lo = num(std::string_view(item).substr(0, dots));
      const u64 hi = num(std::string_view(item).substr(dots + 2));
      if (hi < lo || hi - lo > 100'000) throw UsageError("bad N range: " + item);
      for (u64 v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  if (primes_only) std::erase_if(out, [](u64 v) { return !is_prime(v); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw UsageError("N list is empty");
  return out;
}

std::string join(const std::vector<u64>& v) {
  std::string s;
  for (u64 x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

// The embedded run configuration. Keys are long flag names, so a config
// read back from a file is also a command line. Worker count and output
// location do not change results and are left out.
Config make_config(const std::string& command, const Options& o, const CatMap& A) {
  Config c{{"command", command}, {"matrix", A.to_string()}};
  auto add = [&](const std::string& k, const std::string& v) { c.emplace_back(k, v); };
  if (command == "small-order") {
    add("k-max", std::to_string(o.k_max));
  } else if (command == "census-primes") {
    add("x", std::to_string(o.x));
    add("eta", shortest(o.eta));
  } else if (command == "census-integers") {
    add("x", std::to_string(o.x));
    add("eta", shortest(o.eta));
    add("delta", o.delta);
  } else if (command == "sweep") {
    add("N", join(parse_N_list(o.N_list, o.primes_only)));
    add("n", o.n);
    if (!o.f.empty()) add("f", Observable::parse(o.f).to_string());
    add("dense-limit", std::to_string(o.dense_limit));
    add("seed", std::to_string(o.seed));
    add("tol-spectral", shortest(o.tol_spectral));
    add("tol-relative", shortest(o.tol_relative));
    if (o.timing) add("timing", "1");
  } else if (command == "profile") {
    add("N", std::to_string(o.N));
    add("eta", shortest(o.eta));
  } else if (command == "nu") {
    add("N", std::to_string(o.N));
    add("n", o.n);
    if (o.brute) add("brute", "1");
  } else if (command == "propagator") {
    add("N", std::to_string(o.N));
    add("path", o.path);
  } else if (command == "spectrum") {
    add("N", std::to_string(o.N));
    add("seed", std::to_string(o.seed));
  } else if (command == "fourth-moment") {
    add("N", std::to_string(o.N));
    add("n", o.n);
    add("seed", std::to_string(o.seed));
  }
  return c;
}

const std::vector<std::string> kFlagKeys{"timing", "brute"};

std::vector<std::string> args_from_config(const Config& config) {
  std::vector<std::string> args;
  for (const auto& [k, v] : config) {
    if (k == "command") {
      args.insert(args.begin(), v);
    } else if (std::find(kFlagKeys.begin(), kFlagKeys.end(), k) != kFlagKeys.end()) {
      if (v == "1") args.push_back("--" + k);
    } else {
      args.push_back("--" + k);
      args.push_back(v);
    }
  }
  return args;
}

void write_text(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
  if (!file || !(file << text) || !file.flush()) throw Error(Errc::IoError, "cannot write " + o.out);
}

void write_document(const Options& o, const Config& config, json body, std::ostream& out) {
  json doc;
  json c = json::object();
  for (const auto& [k, v] : config) c[k] = v;
  doc["config"] = c;
  for (auto& [k, v] : body.items()) doc[k] = v;
  write_text(o, doc.dump(2) + "\n", out);
}

using Compute = std::function<std::vector<Row>(u64 after_key)>;
using Summarize = std::function<json(const std::vector<Row>&)>;

void run_table(const Options& o, const std::string& kind, const Config& config, const Compute& compute,
               const Summarize& summarize, std::ostream& out, std::ostream& err) {
  const Format format = parse_format(o.format);
  std::vector<Row> all;
  if (o.out.empty()) {
    if (o.resume) throw UsageError("--resume needs --out");
    all = compute(0);
    Table t{kind, config, {}};
    out << header_text(t, format);
    for (const auto& r : all) out << row_text(kind, r, format);
    err << summarize(all).dump(2) << "\n";
    return;
  }
  std::optional<Table> existing;
  if (o.resume) existing = resume_results(o.out, kind, config, format);
  if (existing) {
    const u64 after = existing->rows.empty() ? 0 : row_key(existing->rows.back());
    std::vector<Row> fresh = compute(after);
    append_rows(o.out, kind, fresh, format);
    all = std::move(existing->rows);
    all.insert(all.end(), fresh.begin(), fresh.end());
  } else {
    all = compute(0);
    store_results(Table{kind, config, all}, o.out, format);
  }
  out << summarize(all).dump(2) << "\n";
}

template <class R, class From>
std::vector<R> records_of(const std::vector<Row>& rows, From from) {
  std::vector<R> out;
  for (const auto& r : rows) out.push_back(from(r));
  return out;
}

template <class R>
std::vector<Row> rows_of(const std::vector<R>& records) {
  std::vector<Row> out;
  for (const auto& r : records) out.push_back(to_row(r));
  return out;
}

SpectrumOptions spectrum_options(const Options& o) {
  SpectrumOptions s;
  s.seed = o.seed;
  s.tol.spectral = o.tol_spectral;
  s.tol.relative = o.tol_relative;
  return s;
}

int run_check(const Options& o, const CatMap& A, std::ostream& out);

int dispatch(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
  const CatMap A = parse_map(o.matrix);
  const Config config = make_config(command, o, A);
  const unsigned workers = resolve_workers(o.workers);

  if (command == "order") {
    out << ord(A, o.N) << "\n";
  } else if (command == "profile") {
    const OrderProfile p = order_profile(A, o.N);
    const ClassSplit s = split_by_class(A, o.N, o.eta);
    write_document(o, config,
                   {{"N", p.N}, {"d", p.d}, {"s", p.s}, {"d0", p.d0}, {"L", p.L}, {"ord", p.ord},
                    {"prime_order_product", p.prime_order_product}, {"lower_bound", p.lower_bound},
                    {"omega", p.omega}, {"bound_holds", p.bound_holds()}, {"in_S", p.in_generic_set()},
                    {"NG", s.good}, {"NB", s.bad}, {"NT", s.terrible}},
                   out);
  } else if (command == "nu") {
    const Vec2 n = parse_vec2(o.n);
    const NuCount nu = count_nu(A, o.N, n);
    json body{{"N", nu.N}, {"n", {n[0], n[1]}}, {"r", nu.r}, {"nu", nu.nu}, {"trivial_count", nu.trivial_count}};
    body["minus_one_exponent"] = nu.minus_one_exponent ? json(*nu.minus_one_exponent) : json(nullptr);
    body["three_r_squared"] = 3 * nu.r * nu.r;
    if (o.brute) body["brute"] = count_nu_brute(A, o.N, n);
    write_document(o, config, body, out);
  } else if (command == "small-order") {
    run_table(
        o, "small-order", config,
        [&](u64 after) {
          auto rows = small_order_report(A, o.k_max, workers);
          std::erase_if(rows, [&](const SmallOrderRow& r) { return static_cast<u64>(r.k) <= after; });
          return rows_of(rows);
        },
        [&](const std::vector<Row>& rows) {
          bool ok = true;
          u64 flagged = 0;
          for (const auto& r : records_of<SmallOrderRow>(rows, small_order_row_from)) {
            if (!r.status.empty()) ++flagged;
            else ok = ok && r.ord <= static_cast<u64>(r.k) && r.k % r.ord == 0;
          }
          return json{{"rows", rows.size()}, {"flagged", flagged}, {"ord_le_k", ok}};
        },
        out, err);
  } else if (command == "census-primes") {
    check_eta(o.eta);
    if (o.x < 100) throw Error(Errc::InvalidArgument, "x must be >= 100");
    run_table(
        o, "primes", config, [&](u64 after) { return rows_of(prime_records(A, after, o.x, o.x, o.eta, workers)); },
        [&](const std::vector<Row>& rows) {
          return to_json(summarize_primes(records_of<PrimeRecord>(rows, prime_record_from), o.x, o.eta));
        },
        out, err);
  } else if (command == "census-integers") {
    check_eta(o.eta);
    if (o.x < 100) throw Error(Errc::InvalidArgument, "x must be >= 100");
    const auto grid = parse_doubles(o.delta);
    run_table(
        o, "integers", config, [&](u64 after) { return rows_of(integer_records(A, after, o.x, o.eta, workers)); },
        [&](const std::vector<Row>& rows) {
          return to_json(summarize_integers(records_of<IntegerRecord>(rows, integer_record_from), o.x, o.eta, grid));
        },
        out, err);
  } else if (command == "propagator") {
    PropagatorPath path = o.path == "fast"          ? PropagatorPath::Fast
                          : o.path == "intertwiner" ? PropagatorPath::Intertwiner
                          : o.path == "auto"        ? PropagatorPath::Auto
                                                    : throw UsageError("path must be auto, fast or intertwiner");
    const Operator U = propagator(A, o.N, path);
    write_document(o, config, {{"egorov_residual", egorov_residual(U, A, 3)}, {"operator", operator_to_json(U)}}, out);
  } else if (command == "spectrum") {
    const QuantumModel m = build_model(A, o.N, spectrum_options(o));
    write_document(o, config, {{"order", m.order}, {"spectrum", spectrum_to_json(m.eig)}}, out);
  } else if (command == "fourth-moment") {
    const Vec2 n = parse_vec2(o.n);
    const FourthMoment fm = fourth_moment(A, o.N, n, spectrum_options(o));
    write_document(o, config,
                   {{"N", o.N}, {"n", {n[0], n[1]}}, {"S4", fm.S4}, {"bound", fm.bound}, {"ratio", fm.S4 / fm.bound},
                    {"max_term", fm.max_term}, {"order", fm.order}, {"nu", fm.nu},
                    {"holds", fm.S4 <= fm.bound * (1 + o.tol_relative) + 1e-10}},
                   out);
  } else if (command == "sweep") {
    if (o.N_list.empty()) throw UsageError("sweep needs --N");
    SweepConfig sc;
    sc.N_list = parse_N_list(o.N_list, o.primes_only);
    sc.n = parse_vec2(o.n);
    if (!o.f.empty()) sc.f = Observable::parse(o.f);
    sc.dense_limit = o.dense_limit;
    sc.workers = workers;
    sc.timing = o.timing;
    sc.spectrum = spectrum_options(o);
    run_table(
        o, "sweep", config,
        [&](u64 after) {
          SweepConfig part = sc;
          std::erase_if(part.N_list, [after](u64 N) { return N <= after; });
          return rows_of(quantum_sweep(A, part));
        },
        [&](const std::vector<Row>& rows) {
          u64 errors = 0, violations = 0;
          for (const auto& r : records_of<SweepRecord>(rows, sweep_record_from)) {
            if (!r.error.empty()) ++errors;
            else if (!r.holds) ++violations;
          }
          return json{{"rows", rows.size()}, {"errors", errors}, {"violations", violations}};
        },
        out, err);
  } else if (command == "check") {
    return run_check(o, A, out);
  }
  return 0;
}

int run_parsed(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int replay(const Options& o, std::ostream& out, std::ostream& err) {
  std::ifstream in(o.replay_file, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + o.replay_file);
  std::string first;
  std::getline(in, first);
  Config config;
  std::string format = "csv";
  if (first.starts_with("#") || (first.starts_with("{") && first.find("\"catmap-census\"") != std::string::npos)) {
    Format detected;
    const Table t = load_results(o.replay_file, &detected);
    config = t.config;
    format = std::string(to_string(detected));
  } else {
    std::stringstream ss;
    ss << first << "\n" << in.rdbuf();
    json doc;
    try {
      doc = json::parse(ss.str());
    } catch (const json::exception& e) {
      throw Error(Errc::SchemaMismatch, o.replay_file + " is not a catmap artifact");
    }
    if (!doc.contains("config")) throw Error(Errc::SchemaMismatch, o.replay_file + " has no embedded config");
    for (const auto& [k, v] : doc["config"].items()) config.emplace_back(k, v.get<std::string>());
  }
  std::vector<std::string> args = args_from_config(config);
  if (args.empty()) throw Error(Errc::SchemaMismatch, "embedded config has no command");
  if (args[0] == "replay" || args[0] == "check") throw Error(Errc::SchemaMismatch, "cannot replay " + args[0]);
  const std::string& cmd = args[0];
  if (cmd == "small-order" || cmd == "census-primes" || cmd == "census-integers" || cmd == "sweep") {
    args.push_back("--format");
    args.push_back(format);
  }
  if (!o.out.empty()) {
    args.push_back("--out");
    args.push_back(o.out);
  }
  args.push_back("--workers");
  args.push_back(std::to_string(o.workers));
  return run_parsed(args, out, err);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every artifact command, re-run from the config embedded in its own output,
// must produce the same bytes.
CheckResult replay_check(const Options& o) {
  CheckResult r;
  r.name = "replay-reproduces";
  const auto start = std::chrono::steady_clock::now();
  const auto dir = std::filesystem::temp_directory_path() / ("catmap-replay-" + std::to_string(o.check_seed));
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::string>> runs{
      {"census-integers", "--x", "400", "--eta", "0.55"},
      {"census-primes", "--x", "2000", "--eta", "0.52", "--format", "json"},
      {"small-order", "--k-max", "12"},
      {"sweep", "--N", "5..13", "--primes", "--f", "cos1"},
      {"fourth-moment", "-N", "11"},
      {"profile", "-N", "360"},
  };
  r.passed = true;
  int i = 0;
  for (auto args : runs) {
    const auto first = dir / ("a" + std::to_string(i));
    const auto second = dir / ("b" + std::to_string(i));
    ++i;
    args.insert(args.end(), {"--matrix", o.matrix, "--out", first.string(), "--workers", "1"});
    std::ostringstream sink;
    const int c1 = run_parsed(args, sink, sink);
    const int c2 = run_parsed({"replay", first.string(), "--out", second.string(), "--workers", "2"}, sink, sink);
    if (c1 != 0 || c2 != 0 || slurp(first) != slurp(second)) {
      r.passed = false;
      r.detail = args[0] + " artifact not reproduced by replay";
      break;
    }
  }
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  if (r.passed) r.detail = std::to_string(runs.size()) + " artifacts replayed byte-identically";
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int run_check(const Options& o, const CatMap& A, std::ostream& out) {
  CheckOptions options;
  options.A = A;
  options.quick = o.quick;
  options.seed = o.check_seed;
  options.workers = o.workers == 0 ? 4 : o.workers;
  int failed = 0, total = 0;
  auto report = [&](const CheckResult& r) {
    ++total;
    if (!r.passed) ++failed;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2fs", r.seconds);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " (" << secs << ")\n" << std::flush;
  };
  run_checks(options, report);
  report(replay_check(o));
  out << (total - failed) << "/" << total << " checks passed\n";
  return failed == 0 ? 0 : 3;
}

int run_parsed(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantized cat map experiments", "catmap"};
  app.require_subcommand(1);
  Options o;
  if (const char* env = std::getenv("CATMAP_WORKERS")) {
    auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), o.workers);
    if (ec != std::errc{}) o.workers = 0;
  }

  auto common = [&](CLI::App* sub) {
    sub->add_option("--matrix", o.matrix, "Cat map a,b,c,d")->capture_default_str();
    sub->add_option("--out", o.out, "Output file (default stdout)");
    sub->add_option("--workers", o.workers, "Worker threads, 0 = all cores (env CATMAP_WORKERS)");
  };
  auto table = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_flag("--resume", o.resume, "Continue an interrupted run in --out");
  };
  auto modulus = [&](CLI::App* sub) { sub->add_option("-N,--N", o.N, "Modulus / dimension")->required(); };
  auto vec = [&](CLI::App* sub) { sub->add_option("--n", o.n, "Lattice vector n1,n2")->capture_default_str(); };
  auto seed = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "Seed for the spectral sketch"); };

  std::vector<CLI::App*> subs;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    subs.push_back(sub);
    return sub;
  };

  auto* c_order = add("order", "ord(A, N)");
  common(c_order);
  modulus(c_order);
  auto* c_profile = add("profile", "d, s, d0, L(N), lower bound and class split of N");
  common(c_profile);
  modulus(c_profile);
  c_profile->add_option("--eta", o.eta, "Class threshold exponent")->capture_default_str();
  auto* c_nu = add("nu", "Solution count nu(N, n)");
  common(c_nu);
  modulus(c_nu);
  vec(c_nu);
  c_nu->add_flag("--brute", o.brute, "Also run the O(r^4) count");
  auto* c_small = add("small-order", "Moduli N_k with ord(A, N_k) <= k");
  table(c_small);
  c_small->add_option("--k-max", o.k_max, "Largest k")->capture_default_str();
  auto* c_primes = add("census-primes", "ord(A, p) for primes p <= x");
  table(c_primes);
  c_primes->add_option("--x", o.x, "Upper limit")->capture_default_str();
  c_primes->add_option("--eta", o.eta, "Exponent eta in (1/2, 3/5)")->capture_default_str();
  auto* c_ints = add("census-integers", "Order profiles for N <= x");
  table(c_ints);
  c_ints->add_option("--x", o.x, "Upper limit")->capture_default_str();
  c_ints->add_option("--eta", o.eta, "Exponent eta in (1/2, 3/5)")->capture_default_str();
  c_ints->add_option("--delta", o.delta, "Grid of delta for ord > sqrt(N) exp((log N)^delta)")->capture_default_str();
  auto* c_prop = add("propagator", "U_N(A) as JSON");
  common(c_prop);
  modulus(c_prop);
  c_prop->add_option("--path", o.path, "auto, fast or intertwiner")->capture_default_str();
  auto* c_spec = add("spectrum", "Eigenphases and eigenbases of U_N(A)");
  common(c_spec);
  modulus(c_spec);
  seed(c_spec);
  auto* c_fm = add("fourth-moment", "S4 against the nu bound");
  common(c_fm);
  modulus(c_fm);
  vec(c_fm);
  seed(c_fm);
  auto* c_sweep = add("sweep", "Fourth moment, variance and max deviation over a list of N");
  table(c_sweep);
  c_sweep->add_option("--N", o.N_list, "List such as 5..60,71")->required();
  c_sweep->add_flag("--primes", o.primes_only, "Keep only primes from the list");
  vec(c_sweep);
  c_sweep->add_option("--f", o.f, "Observable: cos1 or c:(n1,n2)=re,im;...");
  c_sweep->add_option("--dense-limit", o.dense_limit, "Largest N")->capture_default_str();
  c_sweep->add_flag("--timing", o.timing, "Fill the ms column with wall time");
  c_sweep->add_option("--tol-spectral", o.tol_spectral, "Spectral tolerance")->capture_default_str();
  c_sweep->add_option("--tol-relative", o.tol_relative, "Relative slack on inequalities")->capture_default_str();
  seed(c_sweep);
  auto* c_check = add("check", "Run the invariant suite");
  c_check->add_option("--matrix", o.matrix, "Cat map a,b,c,d")->capture_default_str();
  c_check->add_option("--workers", o.workers, "Worker threads for the parallel checks");
  c_check->add_flag("--quick", o.quick, "Smaller ranges");
  c_check->add_option("--seed", o.check_seed, "Seed for randomized checks");
  auto* c_replay = add("replay", "Re-run the configuration embedded in an artifact");
  c_replay->add_option("file", o.replay_file, "Artifact written by this tool")->required();
  c_replay->add_option("--out", o.out, "Output file (default stdout)");
  c_replay->add_option("--workers", o.workers, "Worker threads");

  std::vector<const char*> argv{"catmap"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run 'catmap --help' for usage\n";
    return 2;
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    const std::string name = sub->get_name();
    try {
      if (name == "replay") return replay(o, out, err);
      return dispatch(name, o, out, err);
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_parsed(args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace catmap
