#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "catmap/error.hpp"

namespace catmap {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/// Largest modulus accepted by the order engine. Keeps p^{k-1}(p+1) and the
/// lcm of orders inside 64 bits.
inline constexpr u64 kMaxModulus = u64{1} << 62;

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

// Requires m < 2^127 so that doubling never overflows.
inline u128 mul_mod(u128 a, u128 b, u128 m) {
  if (m <= UINT64_MAX) {
    return static_cast<u128>(mul_mod(static_cast<u64>(a % m), static_cast<u64>(b % m),
                                     static_cast<u64>(m)));
  }
  a %= m;
  b %= m;
  u128 r = 0;
  while (b != 0) {
    if (b & 1) {
      r += a;
      if (r >= m) r -= m;
    }
    a += a;
    if (a >= m) a -= m;
    b >>= 1;
  }
  return r;
}

template <class UInt>
UInt pow_mod(UInt base, UInt exp, UInt m) {
  UInt result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

template <class UInt>
constexpr UInt gcd(UInt a, UInt b) {
  while (b != 0) {
    UInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline u64 checked_mul(u64 a, u64 b) {
  u64 out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(Errc::ValueTooLarge, "64-bit overflow in " + std::to_string(a) + "*" + std::to_string(b));
  }
  return out;
}

inline u64 checked_lcm(u64 a, u64 b) {
  if (a == 0 || b == 0) return 0;
  return checked_mul(a / gcd(a, b), b);
}

inline i64 floor_mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

/// Modular inverse of a mod m, or 0 when gcd(a, m) != 1.
u64 inverse_mod(u64 a, u64 m);

/// Legendre symbol (a / p) for an odd prime p.
int legendre(i64 a, u64 p);

/// floor(sqrt(n)).
u64 isqrt(u64 n);

std::string to_string(u128 v);
u128 parse_u128(std::string_view s);

}  // namespace catmap
