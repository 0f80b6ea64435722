#pragma once

#include <span>
#include <string>
#include <vector>

#include "catmap/int_math.hpp"

namespace catmap {

template <class UInt>
struct PrimePowerT {
  UInt prime;
  int exponent;

  friend bool operator==(const PrimePowerT&, const PrimePowerT&) = default;
};

/// Complete factorization, primes ascending. `certified` is false when some
/// factor above 3.3e24 was only shown to be a probable prime.
template <class UInt>
struct BasicFactorization {
  std::vector<PrimePowerT<UInt>> factors;
  bool certified = true;

  UInt value() const {
    UInt v = 1;
    for (const auto& f : factors)
      for (int e = 0; e < f.exponent; ++e) v *= f.prime;
    return v;
  }
  bool empty() const { return factors.empty(); }
  std::size_t size() const { return factors.size(); }
};

using PrimePower = PrimePowerT<u64>;
using Factorization = BasicFactorization<u64>;
using WideFactorization = BasicFactorization<u128>;

struct FactorOptions {
  u64 trial_bound = 1'000'000;
  /// Total Pollard-rho iterations allowed per call before FactorizationTimeout.
  u64 rho_budget = u64{1} << 28;
};

/// Above this bound Miller-Rabin with the first 13 prime bases is no longer
/// a proof of primality.
inline constexpr u128 kDeterministicPrimalityBound =
    (static_cast<u128>(3317044064679ULL) * 1'000'000'000'000ULL) + 887385961981ULL;

bool is_prime(u64 n);

struct PrimalityResult {
  bool prime;
  bool certified;
};
/// n < 2^127. Probabilistic (64 rounds, fixed seed) above 3.3e24.
PrimalityResult is_prime_wide(u128 n);

/// Trial division up to options.trial_bound, then Brent's variant of
/// Pollard rho. Throws FactorizationTimeout when the rho budget runs out.
Factorization factorize(u64 n, const FactorOptions& options = {});
WideFactorization factorize_wide(u128 n, const FactorOptions& options = {});

/// Primes below the trial-division bound, built once.
std::span<const std::uint32_t> small_primes();

std::string to_string(const Factorization& f);

}  // namespace catmap
