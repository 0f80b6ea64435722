#include "catmap/quad_order.hpp"

#include <cmath>
#include <cstdlib>
#include <unordered_map>

namespace catmap {

std::string_view to_string(SplitType t) {
  switch (t) {
    case SplitType::Split: return "split";
    case SplitType::Inert: return "inert";
    case SplitType::Ramified: return "ramified";
  }
  return "?";
}

std::string_view to_string(PrimeClass c) {
  switch (c) {
    case PrimeClass::Good: return "good";
    case PrimeClass::Bad: return "bad";
    case PrimeClass::Terrible: return "terrible";
  }
  return "?";
}

int chi(const CatMap& A, u64 p) {
  if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p) + " is not prime");
  return splitting_character(A, p);
}

SplitType split_type(const CatMap& A, u64 p) {
  switch (chi(A, p)) {
    case 1: return SplitType::Split;
    case -1: return SplitType::Inert;
    default: return SplitType::Ramified;
  }
}

u64 norm_one_count(const CatMap& A, u64 M, u64 max_modulus) {
  if (M == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
  if (M > max_modulus) {
    throw Error(Errc::BudgetExceeded, "enumeration modulus " + std::to_string(M) + " above " +
                                          std::to_string(max_modulus));
  }
  const u64 t = static_cast<u64>(floor_mod(A.trace, static_cast<i64>(M)));
  u64 count = 0;
  for (u64 x = 0; x < M; ++x) {
    // f(y) = x^2 + t x y + y^2 - 1, stepped by f(y+1) - f(y) = t x + 2y + 1.
    u64 f = (x * x % M + M - 1 % M) % M;
    u64 step = (t * x + 1) % M;
    const u64 two = 2 % M;
    for (u64 y = 0; y < M; ++y) {
      if (f == 0) ++count;
      f += step;
      if (f >= M) f -= M;
      step += two;
      if (step >= M) step -= M;
    }
  }
  return count;
}

u64 norm_one_group_order(const CatMap& A, u64 N) {
  u64 total = 1;
  for (const auto& [p, e] : factorize(N).factors) {
    u64 pk = 1;
    for (int i = 0; i < e; ++i) pk *= p;
    const int x = splitting_character(A, p);
    u64 local = x == 0 ? norm_one_count(A, pk, kMaxModulus) : pk / p * (x == 1 ? p - 1 : p + 1);
    total = checked_mul(total, local);
  }
  return total;
}

u64 script_L(std::span<const u64> ms) {
  if (ms.empty()) throw Error(Errc::InvalidArgument, "script_L needs a nonempty list");
  u128 running_lcm = ms[0];
  u64 result = 1;
  for (std::size_t j = 1; j < ms.size(); ++j) {
    if (ms[j] == 0) throw Error(Errc::InvalidArgument, "script_L entries must be positive");
    u128 g = gcd<u128>(running_lcm, ms[j]);
    result = checked_mul(result, static_cast<u64>(g));
    running_lcm = running_lcm / g * ms[j];
    if ((running_lcm >> 120) != 0) throw Error(Errc::ValueTooLarge, "lcm overflow in script_L");
  }
  if (ms[0] == 0) throw Error(Errc::InvalidArgument, "script_L entries must be positive");
  return result;
}

bool OrderProfile::bound_holds() const {
  return static_cast<u128>(ord) * L >= prime_order_product;
}

bool OrderProfile::in_generic_set() const {
  if (N < 2) return false;
  const double log_n = std::log(static_cast<double>(N));
  return static_cast<double>(s) <= log_n && omega <= 1.5 * std::log(log_n);
}

OrderProfile order_profile(const CatMap& A, u64 N, const FactorOptions& options) {
  if (N == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
  if (N > kMaxModulus) throw Error(Errc::ValueTooLarge, "modulus above 2^62");
  return order_profile_from(A, N, factorize(N, options), [&](u64 p, int e) {
    return ord_prime_power(A, p, e, options);
  });
}

void check_eta(double eta) {
  if (!(eta > 0.5 && eta < 0.6)) {
    throw Error(Errc::EtaOutOfRange, "eta must lie in (1/2, 3/5), got " + std::to_string(eta));
  }
}

PrimeClass classify_prime_order(const CatMap& A, u64 p, u64 ord_p, double eta) {
  check_eta(eta);
  if (splitting_character(A, p) == 0) return PrimeClass::Terrible;
  const double pd = static_cast<double>(p);
  const double od = static_cast<double>(ord_p);
  if (od >= std::pow(pd, eta)) return PrimeClass::Good;
  if (od < std::sqrt(pd) / std::log(pd)) return PrimeClass::Terrible;
  return PrimeClass::Bad;
}

PrimeClass classify_prime(const CatMap& A, u64 p, double eta) {
  check_eta(eta);
  if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p) + " is not prime");
  return classify_prime_order(A, p, ord_prime_power(A, p, 1), eta);
}

ClassSplit split_by_class(const CatMap& A, u64 N, double eta, const FactorOptions& options) {
  check_eta(eta);
  if (N == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
  ClassSplit split;
  split.eta = eta;
  for (const auto& [p, e] : factorize(N, options).factors) {
    u64 pk = 1;
    for (int i = 0; i < e; ++i) pk *= p;
    PrimeClass cls = classify_prime_order(A, p, ord_prime_power(A, p, 1, options), eta);
    if (cls == PrimeClass::Good) {
      split.good *= pk;
    } else {
      split.bad *= pk;
      if (cls == PrimeClass::Terrible) split.terrible *= pk;
    }
  }
  return split;
}

namespace {

int legendre_wide(i64 a, u128 p) {
  if (p <= UINT64_MAX) return legendre(a, static_cast<u64>(p));
  i128 r = static_cast<i128>(a) % static_cast<i128>(p);
  if (r < 0) r += static_cast<i128>(p);
  if (r == 0) return 0;
  return pow_mod<u128>(static_cast<u128>(r), (p - 1) / 2, p) == 1 ? 1 : -1;
}

i128 checked_mul128(i128 x, i128 y) {
  i128 out;
  if (__builtin_mul_overflow(x, y, &out)) throw Error(Errc::ValueTooLarge, "tr(A^k) overflows 128 bits");
  return out;
}

}  // namespace

SmallOrderFactorization small_order_N(const CatMap& A, int k, const FactorOptions& options) {
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  // tr(A^k) from the Lucas recurrence t_k = tr * t_{k-1} - t_{k-2}.
  i128 prev = 2, cur = A.trace;
  for (int i = 2; i <= k; ++i) {
    i128 next = checked_mul128(A.trace, cur) - prev;
    prev = cur;
    cur = next;
  }
  i128 det = 2 - cur;
  SmallOrderFactorization out;
  out.k = k;
  if (det == 0) throw Error(Errc::DegenerateK, "A^" + std::to_string(k) + " = I over Z");
  out.det_val = static_cast<u128>(det < 0 ? -det : det);

  const u64 disc = static_cast<u64>(std::llabs(A.discriminant));
  for (const auto& [p, e] : factorize(disc).factors) out.delta *= p;

  WideFactorization fact = factorize_wide(out.det_val, options);
  out.certified = fact.certified;
  for (const auto& [p, e] : fact.factors) {
    SmallOrderPrime rec{p, e, SplitType::Ramified, 0, 0};
    if (p <= UINT64_MAX && disc % static_cast<u64>(p) == 0) {
      rec.type = SplitType::Ramified;
    } else {
      rec.type = legendre_wide(A.trace * A.trace - 4, p) == 1 ? SplitType::Split : SplitType::Inert;
    }
    rec.contributed = e / 2;
    out.primes.push_back(rec);
  }

  for (auto& rec : out.primes) {
    for (int i = 0; i < rec.contributed; ++i) {
      if (rec.prime > UINT64_MAX) throw Error(Errc::ValueTooLarge, "N_k exceeds 64 bits");
      out.assembled = checked_mul(out.assembled, static_cast<u64>(rec.prime));
    }
  }
  if (out.assembled > (u64{1} << 63)) throw Error(Errc::ValueTooLarge, "N_k exceeds 2^63");

  // Keep, per prime, the largest power with A^k = I; by CRT this is the
  // largest divisor of the assembled value on which A^k is trivial.
  for (auto& rec : out.primes) {
    if (rec.contributed == 0) continue;
    const u64 p = static_cast<u64>(rec.prime);
    u64 pe = 1;
    for (int i = 0; i < rec.contributed; ++i) pe *= p;
    int e = rec.contributed;
    while (e > 0 && !mat_pow_mod(A, static_cast<u64>(k), pe).is_identity()) {
      pe /= p;
      --e;
    }
    rec.retained = e;
    out.n_k *= pe;
  }

  const u128 assembled = out.assembled;
  u128 square;
  bool overflow = __builtin_mul_overflow(assembled, assembled, &square);
  u128 upper;
  overflow = overflow || __builtin_mul_overflow(square, out.delta, &upper);
  out.size_bounds_hold = assembled <= out.det_val && (overflow || out.det_val <= upper);
  return out;
}

std::optional<u64> minus_one_exponent(const CatMap& A, u64 N, u64 order) {
  if (N <= 2 || order % 2 != 0) return std::nullopt;
  if (mat_pow_mod(A, order / 2, N).is_minus_identity()) return order / 2;
  return std::nullopt;
}

i64 independence_det(const CatMap& A, Vec2 n) {
  const i64 m1 = n[0] * A.a + n[1] * A.c;
  const i64 m2 = n[0] * A.b + n[1] * A.d;
  return n[0] * m2 - n[1] * m1;
}

namespace {

void check_nu_args(u64 N, Vec2 n) {
  if (N < 2) throw Error(Errc::InvalidArgument, "count_nu needs N >= 2");
  if (N > (u64{1} << 31)) throw Error(Errc::ValueTooLarge, "count_nu modulus above 2^31");
  const i64 m = static_cast<i64>(N);
  if (floor_mod(n[0], m) == 0 && floor_mod(n[1], m) == 0) {
    throw Error(Errc::ZeroVector, "n = 0 mod " + std::to_string(N));
  }
}

// Row vectors n A^i mod N for i = 1..r, packed as x * N + y.
std::vector<u64> orbit(const CatMap& A, u64 N, Vec2 n, u64 r) {
  const Mat2ModN M = Mat2ModN::reduce(A, N);
  const i64 m = static_cast<i64>(N);
  u64 x = static_cast<u64>(floor_mod(n[0], m));
  u64 y = static_cast<u64>(floor_mod(n[1], m));
  std::vector<u64> out;
  out.reserve(r);
  for (u64 i = 0; i < r; ++i) {
    u64 nx = (x * M.a + y * M.c) % N;
    u64 ny = (x * M.b + y * M.d) % N;
    x = nx;
    y = ny;
    out.push_back(x * N + y);
  }
  return out;
}

}  // namespace

u64 trivial_solution_count(u64 r, bool has_minus_one) {
  return has_minus_one ? 3 * r * r - 3 * r : 2 * r * r - r;
}

u64 trivial_solution_count(const CatMap& A, u64 N, Vec2 n) {
  check_nu_args(N, n);
  const u64 r = ord(A, N);
  return trivial_solution_count(r, minus_one_exponent(A, N, r).has_value());
}

NuCount count_nu(const CatMap& A, u64 N, Vec2 n) {
  check_nu_args(N, n);
  NuCount out;
  out.N = N;
  out.n = n;
  out.r = ord(A, N);
  out.minus_one_exponent = minus_one_exponent(A, N, out.r);
  out.trivial_count = trivial_solution_count(out.r, out.minus_one_exponent.has_value());

  const std::vector<u64> v = orbit(A, N, n, out.r);
  auto diff = [N](u64 p, u64 q) {
    u64 x = (p / N + N - q / N) % N;
    u64 y = (p % N + N - q % N) % N;
    return x * N + y;
  };
  auto neg = [N](u64 w) { return ((N - w / N) % N) * N + (N - w % N) % N; };

  u64 total = 0;
  if (N * N <= (u64{1} << 22)) {
    std::vector<u64> table(N * N, 0);
    for (u64 i : v)
      for (u64 j : v) ++table[diff(i, j)];
    for (u64 w = 0; w < N * N; ++w)
      if (table[w] != 0) total += table[w] * table[neg(w)];
  } else {
    std::unordered_map<u64, u64> table;
    table.reserve(v.size() * v.size());
    for (u64 i : v)
      for (u64 j : v) ++table[diff(i, j)];
    for (const auto& [w, count] : table) {
      auto it = table.find(neg(w));
      if (it != table.end()) total += count * it->second;
    }
  }
  out.nu = total;
  return out;
}

u64 count_nu_brute(const CatMap& A, u64 N, Vec2 n) {
  check_nu_args(N, n);
  const u64 r = ord(A, N);
  const std::vector<u64> v = orbit(A, N, n, r);
  u64 count = 0;
  for (u64 i : v)
    for (u64 j : v)
      for (u64 k : v)
        for (u64 l : v) {
          u64 x = (i / N + k / N + 2 * N - j / N - l / N) % N;
          u64 y = (i % N + k % N + 2 * N - j % N - l % N) % N;
          if (x == 0 && y == 0) ++count;
        }
  return count;
}

}  // namespace catmap
