#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "catmap/quantum.hpp"

namespace catmap {

/// Number of workers to use; 0 means one per hardware thread.
unsigned resolve_workers(unsigned requested);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Results land
/// in index order, so the output does not depend on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned workers, const std::function<T(std::size_t)>& fn);

/// Smallest-prime-factor table on [0, limit].
class FactorSieve {
 public:
  explicit FactorSieve(u64 limit);
  u64 limit() const { return spf_.size() - 1; }
  bool is_prime(u64 n) const { return n >= 2 && spf_[n] == n; }
  Factorization factor(u64 n) const;

 private:
  std::vector<std::uint32_t> spf_;
};

/// c(eta) = (3 - 5 eta) / (2 (1 - eta)).
double c_eta(double eta);

// --- primes ----------------------------------------------------------------

struct PrimeRecord {
  u64 p = 0;
  int chi = 0;
  u64 ord = 0;
  PrimeClass cls = PrimeClass::Bad;
  bool exceeds = false;  // ord > x^eta
  friend bool operator==(const PrimeRecord&, const PrimeRecord&) = default;
};

/// Primes p in (lo, hi]; `exceeds` is measured against x^eta.
std::vector<PrimeRecord> prime_records(const CatMap& A, u64 lo, u64 hi, u64 x, double eta, unsigned workers);

struct TailRow {
  double exponent;  // y = x^exponent
  double y;
  u64 count;  // #{p <= x : ord(A, p) <= y}
  double y_squared;
};

struct PrimeSummary {
  u64 x = 0;
  double eta = 0.0;
  u64 primes = 0;
  u64 exceeding = 0;
  double fraction = 0.0;
  double c_eta = 0.0;
  std::vector<TailRow> tails;
  u64 class_counts[3] = {0, 0, 0};  // good, bad, terrible
};

PrimeSummary summarize_primes(const std::vector<PrimeRecord>& records, u64 x, double eta,
                              const std::vector<double>& tail_exponents = {0.2, 0.3, 0.4});
u64 small_order_tail(const std::vector<PrimeRecord>& records, double y);

// --- integers --------------------------------------------------------------

struct IntegerRecord {
  u64 N = 0;
  u64 d = 1, s = 1, d0 = 1, L = 1;
  u64 ord = 1;
  u64 lower_bound = 1;
  u64 NG = 1, NB = 1, NT = 1;
  bool in_S = false;
  int omega = 0;
  double ord_over_sqrtN = 0.0;
  friend bool operator==(const IntegerRecord&, const IntegerRecord&) = default;
};

/// N in (lo, hi], N >= 2. Prime orders come from a sieve-backed cache and
/// prime-power orders are lifted one power at a time.
std::vector<IntegerRecord> integer_records(const CatMap& A, u64 lo, u64 hi, double eta, unsigned workers);

struct IntegerCheckpoint {
  u64 x = 0;
  u64 count = 0;
  double ord_above_sqrt = 0.0;   // ord(A,N) > sqrt(N)
  double square_part = 0.0;      // s > log N
  double many_factors = 0.0;     // omega(N) >= (3/2) log log N
  double all_bad = 0.0;          // N_G = 1
  double in_S = 0.0;
  std::vector<double> delta_fractions;  // ord > sqrt(N) exp((log N)^delta)
};

struct IntegerSummary {
  u64 x = 0;
  double eta = 0.0;
  bool skipped_one = false;
  std::vector<double> delta_grid;
  std::vector<IntegerCheckpoint> checkpoints;  // x, x/10, x/100
  std::map<u64, u64> L_distribution;
  u64 bound_violations = 0;
  u64 split_violations = 0;
};

IntegerSummary summarize_integers(const std::vector<IntegerRecord>& records, u64 x, double eta,
                                  const std::vector<double>& delta_grid = {0.1, 0.2, 0.3, 0.4, 0.5});

// --- small-order sequence --------------------------------------------------

struct SmallOrderRow {
  int k = 0;
  u64 n_k = 1;
  u64 ord = 0;
  double ord_over_log = 0.0;
  std::string det;  // decimal |det(A^k - I)|
  u64 assembled = 1;
  bool certified = true;
  bool bounds_hold = true;
  std::string status;  // empty, or the error that stopped the row
  friend bool operator==(const SmallOrderRow&, const SmallOrderRow&) = default;
};

/// Rows for 2 <= k <= k_max with N_k > 1, plus rows flagged with a status
/// where factoring or the order computation failed.
std::vector<SmallOrderRow> small_order_report(const CatMap& A, int k_max, unsigned workers,
                                              const FactorOptions& options = {});

// --- quantum sweep ---------------------------------------------------------

struct SweepConfig {
  std::vector<u64> N_list;
  Vec2 n{1, 0};
  /// Observable for the variance and max_dev columns; e(n.x) when absent.
  std::optional<Observable> f;
  u64 dense_limit = 300;
  unsigned workers = 1;
  bool timing = false;
  SpectrumOptions spectrum;
};

struct SweepRecord {
  u64 N = 0;
  i64 n1 = 0, n2 = 0;
  double S4 = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  double variance = 0.0;
  double max_dev = 0.0;
  u64 rstar = 0;
  double ms = 0.0;
  bool holds = false;
  std::string error;
  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

SweepRecord sweep_one(const CatMap& A, u64 N, const SweepConfig& config);
std::vector<SweepRecord> quantum_sweep(const CatMap& A, const SweepConfig& config);

}  // namespace catmap

#include "catmap/detail/parallel.hpp"
