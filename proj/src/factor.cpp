#include "catmap/factor.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <random>

namespace catmap {

u64 inverse_mod(u64 a, u64 m) {
  if (m == 1) return 0;
  i128 t = 0, new_t = 1;
  i128 r = m, new_r = a % m;
  while (new_r != 0) {
    i128 q = r / new_r;
    i128 tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) return 0;
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

int legendre(i64 a, u64 p) {
  u64 r = static_cast<u64>(floor_mod(a, static_cast<i64>(p)));
  if (r == 0) return 0;
  u64 e = pow_mod<u64>(r, (p - 1) / 2, p);
  return e == 1 ? 1 : -1;
}

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(__builtin_sqrtl(static_cast<long double>(n)));
  while (static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

u128 parse_u128(std::string_view s) {
  if (s.empty()) throw Error(Errc::InvalidArgument, "empty integer");
  u128 v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') throw Error(Errc::InvalidArgument, "not an integer: " + std::string(s));
    u128 next = v * 10 + static_cast<u128>(ch - '0');
    if (next / 10 != v) throw Error(Errc::ValueTooLarge, std::string(s));
    v = next;
  }
  return v;
}

std::span<const std::uint32_t> small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    constexpr std::uint32_t kLimit = 1'000'000;
    std::vector<bool> composite(kLimit + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i <= kLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (u64 j = static_cast<u64>(i) * i; j <= kLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

namespace {

template <class UInt>
bool miller_rabin_round(UInt n, UInt base, UInt d, int s) {
  base %= n;
  if (base == 0) return true;
  UInt x = pow_mod<UInt>(base, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

template <class UInt>
bool small_case(UInt n, bool& result) {
  if (n < 2) {
    result = false;
    return true;
  }
  for (UInt p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}) {
    if (n == p) {
      result = true;
      return true;
    }
    if (n % p == 0) {
      result = false;
      return true;
    }
  }
  return false;
}

}  // namespace

bool is_prime(u64 n) {
  bool result;
  if (small_case(n, result)) return result;
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 base : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    if (!miller_rabin_round<u64>(n, base, d, s)) return false;
  }
  return true;
}

PrimalityResult is_prime_wide(u128 n) {
  if (n <= UINT64_MAX) return {is_prime(static_cast<u64>(n)), true};
  if ((n >> 127) != 0) throw Error(Errc::ValueTooLarge, "primality input must be below 2^127");
  bool result;
  if (small_case(n, result)) return {result, true};
  u128 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u128 base : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}) {
    if (!miller_rabin_round<u128>(n, base, d, s)) return {false, true};
  }
  if (n < kDeterministicPrimalityBound) return {true, true};
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  for (int round = 13; round < 64; ++round) {
    u128 base = (static_cast<u128>(rng()) << 64 | rng()) % (n - 3) + 2;
    if (!miller_rabin_round<u128>(n, base, d, s)) return {false, true};
  }
  return {true, false};
}

namespace {

template <class UInt>
struct Factorer {
  const FactorOptions& options;
  u64 rho_used = 0;
  bool certified = true;
  std::map<UInt, int> found;

  bool prime(UInt n) {
    if constexpr (sizeof(UInt) == 8) {
      return is_prime(n);
    } else {
      auto r = is_prime_wide(n);
      if (r.prime && !r.certified) certified = false;
      return r.prime;
    }
  }

  UInt rho(UInt n) {
    if ((n & 1) == 0) return 2;
    for (UInt c = 1;; ++c) {
      constexpr u64 kBatch = 128;
      UInt y = 2, x = 2, ys = 2, q = 1, g = 1;
      u64 r = 1;
      auto f = [&](UInt v) {
        UInt w = mul_mod(v, v, n) + c;
        return w >= n ? w - n : w;
      };
      do {
        x = y;
        for (u64 i = 0; i < r; ++i) y = f(y);
        u64 k = 0;
        do {
          ys = y;
          u64 steps = std::min(kBatch, r - k);
          for (u64 i = 0; i < steps; ++i) {
            y = f(y);
            UInt diff = x > y ? x - y : y - x;
            q = mul_mod(q, diff, n);
          }
          rho_used += steps;
          if (rho_used > options.rho_budget) {
            throw Error(Errc::FactorizationTimeout, "rho budget exhausted on " + to_string(static_cast<u128>(n)));
          }
          g = gcd<UInt>(q, n);
          k += steps;
        } while (k < r && g == 1);
        r *= 2;
      } while (g == 1);
      if (g == n) {
        do {
          ys = f(ys);
          UInt diff = x > ys ? x - ys : ys - x;
          g = gcd<UInt>(diff, n);
        } while (g == 1);
      }
      if (g != n) return g;
    }
  }

  void split(UInt n) {
    if (n == 1) return;
    if (prime(n)) {
      ++found[n];
      return;
    }
    UInt d = rho(n);
    split(d);
    split(n / d);
  }

  void run(UInt n) {
    for (std::uint32_t p : small_primes()) {
      if (p > options.trial_bound) break;
      if (static_cast<u128>(p) * p > n) break;
      if (n % p != 0) continue;
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      found[p] += e;
    }
    split(n);
  }
};

template <class UInt>
BasicFactorization<UInt> factorize_impl(UInt n, const FactorOptions& options) {
  if (n == 0) throw Error(Errc::InvalidArgument, "cannot factor 0");
  Factorer<UInt> f{options, 0, true, {}};
  f.run(n);
  BasicFactorization<UInt> out;
  out.certified = f.certified;
  for (auto [p, e] : f.found) out.factors.push_back({p, e});
  return out;
}

}  // namespace

Factorization factorize(u64 n, const FactorOptions& options) {
  return factorize_impl<u64>(n, options);
}

WideFactorization factorize_wide(u128 n, const FactorOptions& options) {
  if ((n >> 127) != 0) throw Error(Errc::ValueTooLarge, "factorization input must be below 2^127");
  if (n <= UINT64_MAX) {
    auto narrow = factorize_impl<u64>(static_cast<u64>(n), options);
    WideFactorization out;
    for (auto [p, e] : narrow.factors) out.factors.push_back({p, e});
    return out;
  }
  return factorize_impl<u128>(n, options);
}

std::string to_string(const Factorization& f) {
  std::string s;
  for (const auto& pp : f.factors) {
    if (!s.empty()) s += " * ";
    s += std::to_string(pp.prime);
    if (pp.exponent > 1) s += "^" + std::to_string(pp.exponent);
  }
  return s.empty() ? "1" : s;
}

}  // namespace catmap
