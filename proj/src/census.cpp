#include "catmap/census.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace catmap {

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

FactorSieve::FactorSieve(u64 limit) {
  if (limit > (u64{1} << 32) - 2) throw Error(Errc::ValueTooLarge, "sieve limit above 2^32");
  spf_.assign(limit + 1, 0);
  for (u64 i = 2; i <= limit; ++i) {
    if (spf_[i] != 0) continue;
    spf_[i] = static_cast<std::uint32_t>(i);
    for (u64 j = i * i; j <= limit; j += i)
      if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
  }
}

Factorization FactorSieve::factor(u64 n) const {
  if (n == 0 || n > limit()) throw Error(Errc::InvalidArgument, "sieve cannot factor " + std::to_string(n));
  Factorization out;
  while (n > 1) {
    const u64 p = spf_[n];
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.factors.push_back({p, e});
  }
  return out;
}

double c_eta(double eta) { return (3.0 - 5.0 * eta) / (2.0 * (1.0 - eta)); }

namespace {

constexpr u64 kChunk = 4096;

u64 prime_order(const CatMap& A, const FactorSieve& sieve, u64 p) {
  const int x = splitting_character(A, p);
  if (x == 0) return ord_prime_power(A, p, 1);
  return order_dividing(A, p, sieve.factor(x == 1 ? p - 1 : p + 1));
}

template <class Record, class Fn>
std::vector<Record> chunked(u64 lo, u64 hi, unsigned workers, Fn&& per_key) {
  const u64 span = hi > lo ? hi - lo : 0;
  const std::size_t chunks = static_cast<std::size_t>((span + kChunk - 1) / kChunk);
  auto parts = parallel_map<std::vector<Record>>(chunks, workers, [&](std::size_t c) {
    std::vector<Record> part;
    const u64 first = lo + 1 + c * kChunk;
    const u64 last = std::min(hi, first + kChunk - 1);
    for (u64 key = first; key <= last; ++key) per_key(key, part);
    return part;
  });
  std::vector<Record> out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

}  // namespace

std::vector<PrimeRecord> prime_records(const CatMap& A, u64 lo, u64 hi, u64 x, double eta, unsigned workers) {
  check_eta(eta);
  const FactorSieve sieve(hi + 1);
  const double threshold = std::pow(static_cast<double>(x), eta);
  return chunked<PrimeRecord>(lo, hi, workers, [&](u64 p, std::vector<PrimeRecord>& out) {
    if (!sieve.is_prime(p)) return;
    PrimeRecord r;
    r.p = p;
    r.chi = splitting_character(A, p);
    r.ord = prime_order(A, sieve, p);
    r.cls = classify_prime_order(A, p, r.ord, eta);
    r.exceeds = static_cast<double>(r.ord) > threshold;
    out.push_back(r);
  });
}

u64 small_order_tail(const std::vector<PrimeRecord>& records, double y) {
  return static_cast<u64>(std::count_if(records.begin(), records.end(),
                                        [y](const PrimeRecord& r) { return static_cast<double>(r.ord) <= y; }));
}

PrimeSummary summarize_primes(const std::vector<PrimeRecord>& records, u64 x, double eta,
                              const std::vector<double>& tail_exponents) {
  if (x < 100) throw Error(Errc::InvalidArgument, "prime census needs x >= 100");
  check_eta(eta);
  PrimeSummary s;
  s.x = x;
  s.eta = eta;
  s.c_eta = c_eta(eta);
  for (const auto& r : records) {
    if (r.p > x) continue;
    ++s.primes;
    if (r.exceeds) ++s.exceeding;
    ++s.class_counts[static_cast<int>(r.cls)];
  }
  s.fraction = s.primes == 0 ? 0.0 : static_cast<double>(s.exceeding) / static_cast<double>(s.primes);
  for (double e : tail_exponents) {
    const double y = std::pow(static_cast<double>(x), e);
    s.tails.push_back({e, y, small_order_tail(records, y), y * y});
  }
  return s;
}

std::vector<IntegerRecord> integer_records(const CatMap& A, u64 lo, u64 hi, double eta, unsigned workers) {
  check_eta(eta);
  if (hi <= lo || hi < 2) return {};
  const FactorSieve sieve(hi + 1);

  // ord(A, p) and its class for every prime p <= hi.
  std::vector<std::uint32_t> prime_ord(hi + 1, 0);
  std::vector<std::uint8_t> prime_cls(hi + 1, 0);
  {
    const std::size_t chunks = static_cast<std::size_t>((hi + kChunk - 1) / kChunk);
    parallel_map<int>(chunks, workers, [&](std::size_t c) {
      const u64 first = std::max<u64>(2, c * kChunk);
      const u64 last = std::min<u64>(hi, (c + 1) * kChunk - 1);
      for (u64 p = first; p <= last; ++p) {
        if (!sieve.is_prime(p)) continue;
        const u64 o = prime_order(A, sieve, p);
        prime_ord[p] = static_cast<std::uint32_t>(o);
        prime_cls[p] = static_cast<std::uint8_t>(classify_prime_order(A, p, o, eta));
      }
      return 0;
    });
  }

  return chunked<IntegerRecord>(std::max<u64>(lo, 1), hi, workers, [&](u64 N, std::vector<IntegerRecord>& out) {
    const Factorization fact = sieve.factor(N);
    auto prime_power_order = [&](u64 p, int e) {
      u64 o = prime_ord[p];
      u64 pk = p;
      for (int i = 2; i <= e; ++i) {
        pk *= p;
        o = lift_order(A, p, pk, o);
      }
      return o;
    };
    const OrderProfile prof = order_profile_from(A, N, fact, prime_power_order);
    IntegerRecord r;
    r.N = N;
    r.d = prof.d;
    r.s = prof.s;
    r.d0 = prof.d0;
    r.L = prof.L;
    r.ord = prof.ord;
    r.lower_bound = prof.lower_bound;
    r.omega = prof.omega;
    r.in_S = prof.in_generic_set();
    r.ord_over_sqrtN = static_cast<double>(prof.ord) / std::sqrt(static_cast<double>(N));
    for (const auto& [p, e] : fact.factors) {
      u64 pk = 1;
      for (int i = 0; i < e; ++i) pk *= p;
      const auto cls = static_cast<PrimeClass>(prime_cls[p]);
      if (cls == PrimeClass::Good) {
        r.NG *= pk;
      } else {
        r.NB *= pk;
        if (cls == PrimeClass::Terrible) r.NT *= pk;
      }
    }
    out.push_back(r);
  });
}

IntegerSummary summarize_integers(const std::vector<IntegerRecord>& records, u64 x, double eta,
                                  const std::vector<double>& delta_grid) {
  if (x < 100) throw Error(Errc::InvalidArgument, "integer census needs x >= 100");
  check_eta(eta);
  IntegerSummary s;
  s.x = x;
  s.eta = eta;
  s.skipped_one = true;
  s.delta_grid = delta_grid;
  for (u64 X : {x, x / 10, x / 100}) {
    IntegerCheckpoint cp;
    cp.x = X;
    cp.delta_fractions.assign(delta_grid.size(), 0.0);
    s.checkpoints.push_back(cp);
  }
  std::vector<std::array<u64, 5>> counts(3, std::array<u64, 5>{});
  std::vector<std::vector<u64>> delta_counts(3, std::vector<u64>(delta_grid.size(), 0));
  for (const auto& r : records) {
    if (r.N > x) continue;
    ++s.L_distribution[r.L];
    if (r.ord < r.lower_bound) ++s.bound_violations;
    if (r.NG * r.NB != r.N || r.NB % r.NT != 0) ++s.split_violations;
    const double log_n = std::log(static_cast<double>(r.N));
    const bool above_sqrt = static_cast<u128>(r.ord) * r.ord > r.N;
    const bool square = static_cast<double>(r.s) > log_n;
    const bool many = static_cast<double>(r.omega) >= 1.5 * std::log(log_n);
    for (std::size_t c = 0; c < 3; ++c) {
      if (r.N > s.checkpoints[c].x) continue;
      ++s.checkpoints[c].count;
      counts[c][0] += above_sqrt;
      counts[c][1] += square;
      counts[c][2] += many;
      counts[c][3] += r.NG == 1;
      counts[c][4] += r.in_S;
      for (std::size_t g = 0; g < delta_grid.size(); ++g) {
        const double threshold = std::sqrt(static_cast<double>(r.N)) * std::exp(std::pow(log_n, delta_grid[g]));
        if (static_cast<double>(r.ord) > threshold) ++delta_counts[c][g];
      }
    }
  }
  for (std::size_t c = 0; c < 3; ++c) {
    auto& cp = s.checkpoints[c];
    const double n = cp.count == 0 ? 1.0 : static_cast<double>(cp.count);
    cp.ord_above_sqrt = static_cast<double>(counts[c][0]) / n;
    cp.square_part = static_cast<double>(counts[c][1]) / n;
    cp.many_factors = static_cast<double>(counts[c][2]) / n;
    cp.all_bad = static_cast<double>(counts[c][3]) / n;
    cp.in_S = static_cast<double>(counts[c][4]) / n;
    for (std::size_t g = 0; g < delta_grid.size(); ++g) cp.delta_fractions[g] = static_cast<double>(delta_counts[c][g]) / n;
  }
  return s;
}

std::vector<SmallOrderRow> small_order_report(const CatMap& A, int k_max, unsigned workers,
                                              const FactorOptions& options) {
  if (k_max < 2) throw Error(Errc::InvalidArgument, "k_max must be >= 2");
  auto rows = parallel_map<std::optional<SmallOrderRow>>(
      static_cast<std::size_t>(k_max - 1), workers, [&](std::size_t i) -> std::optional<SmallOrderRow> {
        SmallOrderRow row;
        row.k = static_cast<int>(i) + 2;
        try {
          const SmallOrderFactorization f = small_order_N(A, row.k, options);
          row.det = to_string(f.det_val);
          row.assembled = f.assembled;
          row.certified = f.certified;
          row.bounds_hold = f.size_bounds_hold;
          row.n_k = f.n_k;
          if (f.n_k == 1) return std::nullopt;
          row.ord = ord(A, f.n_k, options);
          row.ord_over_log = static_cast<double>(row.ord) / std::log(static_cast<double>(f.n_k));
        } catch (const Error& e) {
          row.status = e.what();
        }
        return row;
      });
  std::vector<SmallOrderRow> out;
  for (auto& r : rows)
    if (r) out.push_back(std::move(*r));
  return out;
}

SweepRecord sweep_one(const CatMap& A, u64 N, const SweepConfig& config) {
  SweepRecord rec;
  rec.N = N;
  rec.n1 = config.n[0];
  rec.n2 = config.n[1];
  const auto start = std::chrono::steady_clock::now();
  try {
    if (N > config.dense_limit) {
      throw Error(Errc::InvalidArgument, "N = " + std::to_string(N) + " above dense limit " +
                                             std::to_string(config.dense_limit));
    }
    const i64 m = static_cast<i64>(N);
    if (N < 2 || (detail::mod_i64(config.n[0], m) == 0 && detail::mod_i64(config.n[1], m) == 0)) {
      throw Error(Errc::ZeroVector, "n = 0 mod " + std::to_string(N));
    }
    const QuantumModel model = build_model(A, N, config.spectrum);
    const FourthMoment fm = fourth_moment(model.eig, A, config.n);
    const Observable f = config.f.value_or(Observable::mode(config.n));
    const auto diag = diagonal_elements(weyl_quantize(N, f), model.eig);
    rec.S4 = fm.S4;
    rec.bound = fm.bound;
    rec.ratio = fm.S4 / fm.bound;
    rec.variance = variance_stat(diag, f.mean());
    rec.max_dev = max_deviation(diag, f.mean());
    rec.rstar = model.eig.rstar;
    const double slack = 1.0 + config.spectrum.tol.relative;
    rec.holds = rec.ratio <= slack;
    // The fourth power of the largest deviation is one term of S4 only when
    // f is the single mode e(n.x).
    if (f == Observable::mode(config.n)) {
      rec.holds = rec.holds && std::pow(rec.max_dev, 4) <= rec.bound * slack;
    }
  } catch (const Error& e) {
    rec.error = e.what();
  }
  if (config.timing) {
    rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

std::vector<SweepRecord> quantum_sweep(const CatMap& A, const SweepConfig& config) {
  return parallel_map<SweepRecord>(config.N_list.size(), config.workers,
                                   [&](std::size_t i) { return sweep_one(A, config.N_list[i], config); });
}

}  // namespace catmap
