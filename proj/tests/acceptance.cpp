// Acceptance criteria. `acceptance` runs all of them, `acceptance ID` one.
// Criterion 11 has three parts (11.s, 11.omega, 11.maxdev) that can also be
// run alone.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "catmap/census.hpp"
#include "catmap/cli.hpp"
#include "catmap/quad_order.hpp"
#include "catmap/quantum.hpp"
#include "oracles.hpp"

using namespace catmap;
namespace fs = std::filesystem;

namespace {

constexpr double kEgorovTol = 1e-9;
constexpr double kAlgebraTol = 1e-10;
constexpr double kTraceZeroTol = 1e-8;
constexpr double kResidualTol = 1e-8;
constexpr double kOrthoTol = 1e-10;
constexpr double kRelSlack = 1e-6;
constexpr double kEtaCensus = 0.52;
constexpr u64 kPrimeCensusX = 100'000;

const CatMap A = validate_map(2, 1, 3, 2);
const oracle::M2 A2{2, 1, 3, 2};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

// Keeps the first failure message.
struct Verdict {
  bool pass = true;
  std::string why;
  void require(bool ok, const std::string& msg) {
    if (!ok && pass) {
      pass = false;
      why = msg;
    }
  }
  Outcome done(const std::string& ok_detail) const { return {pass, pass ? ok_detail : why}; }
};

Outcome egorov() {
  Verdict v;
  double worst = 0;
  int count = 0;
  for (u64 N = 3; N <= 41; ++N) {
    const Operator U = propagator(A, N);
    const double r = egorov_residual(U, A, 3);
    worst = std::max(worst, r);
    ++count;
    v.require(r <= kEgorovTol, "N = " + std::to_string(N) + " residual " + fmt(r));
  }
  return v.done(std::to_string(count) + " dimensions in [3, 41], max residual " + fmt(worst, 3));
}

Outcome operator_algebra() {
  Verdict v;
  std::mt19937_64 rng(2);
  double worst = 0;
  for (int N = 1; N <= 20; ++N) {
    std::uniform_int_distribution<i64> pick(-2 * N, 2 * N);
    auto check = [&](i64 a, i64 b, i64 c, i64 d) {
      const Operator Tn = translation(u64(N), {a, b}), Tm = translation(u64(N), {c, d});
      const double omega = static_cast<double>(a * d - b * c);
      const Complex half = std::polar(1.0, M_PI * omega / N);
      const Complex full = std::polar(1.0, 2 * M_PI * omega / N);
      const double e1 = (Tn * Tm - full * Tm * Tn).cwiseAbs().maxCoeff();
      const double e2 = (Tn * Tm - half * translation(u64(N), {a + c, b + d})).cwiseAbs().maxCoeff();
      const double e3 = (Tn.adjoint() - translation(u64(N), {-a, -b})).cwiseAbs().maxCoeff();
      const double e4 = (Tn - oracle::translation(N, a, b)).cwiseAbs().maxCoeff();
      worst = std::max({worst, e1, e2, e3, e4});
      v.require(std::max({e1, e2, e3, e4}) <= kAlgebraTol, "N = " + std::to_string(N) + " algebra defect");
    };
    for (i64 a = -2; a <= 2; ++a)
      for (i64 b = -2; b <= 2; ++b)
        for (i64 c = -2; c <= 2; ++c)
          for (i64 d = -2; d <= 2; ++d) check(a, b, c, d);
    for (int t = 0; t < 100; ++t) check(pick(rng), pick(rng), pick(rng), pick(rng));
    for (i64 a = -2 * N; a <= 2 * N; ++a)
      for (i64 b = -2 * N; b <= 2 * N; ++b) {
        const double t = std::abs(translation(u64(N), {a, b}).trace());
        const bool zero_mod = a % N == 0 && b % N == 0;
        v.require(zero_mod ? std::abs(t - N) <= kTraceZeroTol : t <= kTraceZeroTol,
                  "trace dichotomy fails at N = " + std::to_string(N));
      }
  }
  return v.done("N <= 20, max defect " + fmt(worst, 3) + ", traces for |n| <= 2N");
}

Outcome spectral_completeness() {
  Verdict v;
  int count = 0;
  double res = 0, ortho = 0;
  for (u64 N = 5; N <= 101; ++N) {
    if (!fast_path_applies(A, N)) continue;
    ++count;
    const QuantumModel m = build_model(A, N);
    v.require(m.eig.total_multiplicity() == int(N), "multiplicities at N = " + std::to_string(N));
    for (const auto& e : m.eig.spaces) {
      const Operator R = m.U * e.basis - e.eigenvalue * e.basis;
      // Basis columns have normalized norm 1, Euclidean norm sqrt(N).
      const double r = R.colwise().norm().maxCoeff() / std::sqrt(double(N));
      const Operator G = e.basis.adjoint() * e.basis / double(N);
      const double o = (G - Operator::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
      res = std::max(res, r);
      ortho = std::max(ortho, o);
      v.require(r <= kResidualTol, "residual " + fmt(r) + " at N = " + std::to_string(N));
      v.require(o <= kOrthoTol, "orthonormality " + fmt(o) + " at N = " + std::to_string(N));
    }
  }
  return v.done(std::to_string(count) + " fast-path dimensions in [5, 101], residual " + fmt(res, 3) +
                ", orthonormality " + fmt(ortho, 3));
}

Outcome fourth_moment_inequality() {
  Verdict v;
  double worst = 0;
  int count = 0;
  for (u64 N = 2; N <= 47; ++N) {
    if (!oracle::prime(N)) continue;
    ++count;
    const FourthMoment f = fourth_moment(A, N, {1, 0});
    const u64 brute = oracle::nu(A2, i64(N), {1, 0});
    v.require(f.nu == brute, "nu mismatch at N = " + std::to_string(N));
    const double r = static_cast<double>(oracle::order(A2, i64(N)));
    const double bound = double(N) / (r * r * r * r) * double(brute);
    worst = std::max(worst, f.S4 / bound);
    v.require(f.S4 <= bound * (1 + kRelSlack), "S4 above bound at N = " + std::to_string(N));
  }
  return v.done(std::to_string(count) + " primes <= 47, max S4/bound " + fmt(worst));
}

Outcome nu_bounds() {
  Verdict v;
  int count = 0;
  for (u64 p = 2; p <= 50; ++p) {
    if (!oracle::prime(p) || 48 % p == 0) continue;  // p | D_A, which also covers repeated eigenvalues
    for (i64 a = -3; a <= 3; ++a)
      for (i64 b = -3; b <= 3; ++b) {
        const i64 det = a * (a * A.b + b * A.d) - b * (a * A.a + b * A.c);
        if (oracle::md(det, i64(p)) == 0) continue;
        const NuCount c = count_nu(A, p, {a, b});
        const u64 r = c.r;
        v.require(2 * r * r - r <= c.nu && c.nu <= 3 * r * r,
                  "nu out of range at p = " + std::to_string(p) + ", n = (" + std::to_string(a) + "," +
                      std::to_string(b) + ")");
        if (a == 1 && b == 0) v.require(c.nu == oracle::nu(A2, i64(p), {1, 0}), "nu brute mismatch");
        ++count;
      }
  }
  return v.done(std::to_string(count) + " (p, n) pairs with p <= 50");
}

Outcome order_engine() {
  Verdict v;
  for (u64 N = 1; N <= 2000; ++N)
    v.require(ord(A, N) == oracle::order(A2, i64(N)), "ord mismatch at N = " + std::to_string(N));
  int primes = 0;
  for (u64 p = 2; p <= 100'000; ++p) {
    if (!is_prime(p) || 48 % p == 0) continue;
    ++primes;
    const int c = splitting_character(A, p);
    const u64 torus = c == 1 ? p - 1 : p + 1;
    v.require(torus % ord(A, p) == 0, "ord does not divide p - chi at p = " + std::to_string(p));
  }
  std::mt19937_64 rng(6);
  int pairs = 0;
  while (pairs < 200) {
    const u64 M = 2 + rng() % 100'000, N = 2 + rng() % 100'000;
    if (std::gcd(M, N) != 1) continue;
    ++pairs;
    v.require(ord(A, M * N) == std::lcm(ord(A, M), ord(A, N)), "lcm composition fails");
  }
  return v.done("N <= 2000 against stepping, " + std::to_string(primes) + " primes, 200 coprime pairs");
}

Outcome norm_one_group() {
  Verdict v;
  int powers = 0;
  for (u64 p = 2; p <= 2000; ++p) {
    if (!oracle::prime(p) || 48 % p == 0) continue;
    const int c = oracle::chi(A2, i64(p));
    u64 q = p, pk1 = 1;
    while (q <= 2000) {
      ++powers;
      const u64 formula = pk1 * static_cast<u64>(static_cast<i64>(p) - c);
      v.require(oracle::norm_one(A2, i64(q)) == formula, "enumeration differs at " + std::to_string(q));
      v.require(norm_one_count(A, q) == formula, "norm_one_count differs at " + std::to_string(q));
      pk1 = q;
      q *= p;
    }
  }
  std::mt19937_64 rng(7);
  int pairs = 0;
  while (pairs < 100) {
    const u64 M = 2 + rng() % 140, N = 2 + rng() % 140;
    if (std::gcd(M, N) != 1) continue;
    ++pairs;
    v.require(norm_one_count(A, M * N) == oracle::norm_one(A2, i64(M)) * oracle::norm_one(A2, i64(N)),
              "CRT multiplicativity fails at " + std::to_string(M) + " * " + std::to_string(N));
  }
  return v.done(std::to_string(powers) + " prime powers <= 2000, 100 coprime pairs");
}

Outcome small_order_sequence() {
  Verdict v;
  std::string report;
  int rows = 0;
  for (int k = 2; k <= 40; ++k) {
    SmallOrderFactorization f;
    try {
      f = small_order_N(A, k);
    } catch (const Error& e) {
      v.require(false, "k = " + std::to_string(k) + ": " + e.what());
      continue;
    }
    u128 back = 1;
    for (const auto& p : f.primes)
      for (int e = 0; e < p.exponent; ++e) back *= p.prime;
    v.require(back == f.det_val, "det factorization does not multiply back at k = " + std::to_string(k));
    if (f.n_k <= 1) continue;
    ++rows;
    const i64 n = static_cast<i64>(f.n_k);
    v.require(oracle::is_identity(oracle::power(A2, u64(k), n), n), "A^k != I mod N_k at k = " + std::to_string(k));
    const u64 o = oracle::order(A2, n);
    v.require(o <= u64(k), "ord > k at k = " + std::to_string(k));
    if (k % 10 == 0 || k <= 3) report += " k=" + std::to_string(k) + ":" + fmt(double(o) / std::log(double(n)), 3);
  }
  return v.done(std::to_string(rows) + " nondegenerate k in [2, 40]; ord/log N_k" + report);
}

Outcome lower_bound() {
  Verdict v;
  for (u64 N = 1; N <= 5000; ++N) {
    u64 product = 1, lcm = 1, torus_product = 1;
    for (const auto& [p, e] : oracle::factor(N)) {
      if (e % 2 == 0 || 48 % p == 0) continue;  // p | d0: odd exponent, unramified
      product *= oracle::order(A2, i64(p));
      const u64 t = oracle::chi(A2, i64(p)) == 1 ? p - 1 : p + 1;
      torus_product *= t;
      lcm = std::lcm(lcm, t);
    }
    const u64 L = torus_product / lcm;
    const u64 o = oracle::order(A2, i64(N));
    v.require(static_cast<u128>(o) * L >= product, "bound fails at N = " + std::to_string(N));
    const OrderProfile prof = order_profile(A, N);
    v.require(prof.L == L && prof.prime_order_product == product, "profile disagrees at N = " + std::to_string(N));
  }
  return v.done("ord * L(N) >= prod ord(A, p) for all N <= 5000");
}

Outcome prime_census() {
  Verdict v;
  const auto recs = prime_records(A, 0, kPrimeCensusX, kPrimeCensusX, kEtaCensus, 1);
  const double threshold = std::pow(double(kPrimeCensusX), kEtaCensus);
  u64 above = 0;
  for (const auto& r : recs) {
    if (r.p <= 3000) v.require(r.ord == oracle::order(A2, i64(r.p)), "ord mismatch at p = " + std::to_string(r.p));
    if (static_cast<double>(r.ord) > threshold) ++above;
  }
  const double fraction = double(above) / double(recs.size());
  const double c = (3 - 5 * kEtaCensus) / (2 * (1 - kEtaCensus));
  v.require(recs.size() == 9592, "pi(10^5) != 9592");
  v.require(fraction >= c, "fraction " + fmt(fraction) + " below c(eta) = " + fmt(c));
  return v.done("fraction " + fmt(fraction) + " >= c(0.52) = " + fmt(c) + " over 9592 primes");
}

// Square part s (N = d s^2) and omega(N) from a smallest-prime-factor sieve.
struct Trend {
  std::vector<double> s_frac, omega_frac;
};

const Trend& trends() {
  static const Trend t = [] {
    const u64 X = 1'000'000;
    std::vector<std::uint32_t> spf(X + 1, 0);
    for (u64 i = 2; i <= X; ++i)
      if (spf[i] == 0)
        for (u64 j = i; j <= X; j += i)
          if (spf[j] == 0) spf[j] = std::uint32_t(i);
    Trend out;
    u64 big_s = 0, many = 0, checkpoint = 10'000;
    for (u64 N = 2; N <= X; ++N) {
      u64 m = N, s = 1;
      int omega = 0;
      while (m > 1) {
        const u64 p = spf[m];
        int e = 0;
        while (m % p == 0) {
          m /= p;
          ++e;
        }
        ++omega;
        for (int i = 0; i < e / 2; ++i) s *= p;
      }
      const double logN = std::log(double(N));
      if (double(s) > logN) ++big_s;
      if (N >= 3 && omega >= 1.5 * std::log(logN)) ++many;
      if (N == checkpoint) {
        out.s_frac.push_back(double(big_s) / double(N - 1));
        out.omega_frac.push_back(double(many) / double(N - 1));
        checkpoint *= 10;
      }
    }
    return out;
  }();
  return t;
}

Outcome decreasing(const std::vector<double>& f, const std::string& what) {
  const bool ok = f.size() == 3 && f[0] > f[1] && f[1] > f[2];
  return {ok, what + " at x = 10^4, 10^5, 10^6: " + fmt(f[0], 4) + ", " + fmt(f[1], 4) + ", " + fmt(f[2], 4) +
                  (ok ? " (decreasing)" : " (not decreasing)")};
}

Outcome trend_square_part() { return decreasing(trends().s_frac, "fraction with s > log N"); }
Outcome trend_omega() { return decreasing(trends().omega_frac, "fraction with omega >= 1.5 log log N"); }

Outcome trend_max_deviation() {
  Verdict v;
  SweepConfig config;
  for (u64 N = 2; N <= 120; ++N) config.N_list.push_back(N);
  config.n = {1, 0};
  double worst = 0;
  for (const auto& r : quantum_sweep(A, config)) {
    v.require(r.error.empty(), "sweep error at N = " + std::to_string(r.N) + ": " + r.error);
    const double lhs = std::pow(r.max_dev, 4);
    worst = std::max(worst, lhs / r.bound);
    v.require(lhs <= r.bound * (1 + kRelSlack), "max_dev^4 above bound at N = " + std::to_string(r.N));
  }
  return v.done("N in [2, 120], n = (1,0), max max_dev^4/bound " + fmt(worst));
}

Outcome determinism() {
  Verdict v;
  const fs::path dir = fs::temp_directory_path() / "catmap-acceptance-determinism";
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::vector<std::vector<std::string>> runs{
      {"census-primes", "--x", "100000", "--eta", "0.52"},
      {"census-integers", "--x", "100000"},
      {"census-integers", "--x", "20000", "--format", "json"},
      {"small-order", "--k-max", "40"},
      {"sweep", "--N", "5..60", "--f", "cos1"},
  };
  std::ostringstream sink;
  int i = 0;
  for (const auto& base : runs) {
    std::string files[2];
    int w = 0;
    for (const char* workers : {"1", "4"}) {
      auto args = base;
      files[w] = (dir / (std::to_string(i) + "-" + workers)).string();
      args.insert(args.end(), {"--workers", workers, "--out", files[w]});
      v.require(run_cli(args, sink, sink) == 0, base[0] + " failed");
      ++w;
    }
    v.require(slurp(files[0]) == slurp(files[1]), base[0] + " differs between 1 and 4 workers");
    ++i;
  }
  std::ostringstream out;
  const int code = run_cli({"check"}, out, sink);
  v.require(code == 0, "check exited " + std::to_string(code) + "\n" + out.str());
  fs::remove_all(dir);
  return v.done(std::to_string(runs.size()) + " artifacts byte-identical at 1 and 4 workers; check exits 0");
}

struct Criterion {
  std::string id;
  std::string name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"1", "Egorov exactness", egorov},
      {"2", "operator algebra", operator_algebra},
      {"3", "spectral completeness", spectral_completeness},
      {"4", "fourth-moment inequality", fourth_moment_inequality},
      {"5", "nu bounds", nu_bounds},
      {"6", "order engine", order_engine},
      {"7", "norm-one group", norm_one_group},
      {"8", "small-order sequence", small_order_sequence},
      {"9", "L(N) lower bound", lower_bound},
      {"10", "prime census vs c(eta)", prime_census},
      {"11.s", "square-part trend", trend_square_part},
      {"11.omega", "omega trend", trend_omega},
      {"11.maxdev", "max deviation bound", trend_max_deviation},
      {"12", "determinism", determinism},
  };
  return all;
}

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
            << fmt(secs, 3) << " s]" << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string want = argc > 1 ? argv[1] : "";
  bool ok = true, found = false;
  std::map<std::string, bool> eleven;
  for (const auto& c : criteria()) {
    if (!want.empty() && c.id != want && !(want == "11" && c.id.starts_with("11."))) continue;
    found = true;
    const bool pass = run_one(c);
    ok = ok && pass;
    if (c.id.starts_with("11.")) eleven[c.id] = pass;
  }
  if (eleven.size() == 3) {
    const bool all = eleven["11.s"] && eleven["11.omega"] && eleven["11.maxdev"];
    std::cout << (all ? "PASS" : "FAIL") << " criterion 11 (asymptotic trends): parts s "
              << (eleven["11.s"] ? "pass" : "fail") << ", omega " << (eleven["11.omega"] ? "pass" : "fail")
              << ", maxdev " << (eleven["11.maxdev"] ? "pass" : "fail") << std::endl;
  }
  if (!found) {
    std::cerr << "unknown criterion " << want << "\n";
    return 2;
  }
  return ok ? 0 : 1;
}
