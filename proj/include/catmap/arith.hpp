#pragma once

#include <span>
#include <string>

#include "catmap/factor.hpp"
#include "catmap/int_math.hpp"

namespace catmap {

/// A quantizable hyperbolic element of SL(2,Z), acting on row vectors
/// n -> nA. Only constructed through validate_map.
struct CatMap {
  i64 a = 0, b = 0, c = 0, d = 0;
  i64 trace = 0;
  /// 4(tr^2 - 4); K = Q(sqrt(discriminant)).
  i64 discriminant = 0;
  /// log of the expanding eigenvalue (|tr| + sqrt(tr^2 - 4)) / 2.
  double eps_log = 0.0;

  std::string to_string() const;  // "a,b,c,d"
  friend bool operator==(const CatMap&, const CatMap&) = default;
};

/// Throws NotUnimodular, NotHyperbolic or NotQuantizable.
CatMap validate_map(i64 a, i64 b, i64 c, i64 d);
/// Parses "a,b,c,d" and validates.
CatMap parse_map(std::string_view text);

struct Mat2ModN {
  u64 modulus = 1;
  u64 a = 0, b = 0, c = 0, d = 0;

  static Mat2ModN identity(u64 modulus);
  static Mat2ModN reduce(const CatMap& A, u64 modulus);

  bool is_identity() const;
  bool is_minus_identity() const;
  Mat2ModN operator*(const Mat2ModN& rhs) const;
  friend bool operator==(const Mat2ModN&, const Mat2ModN&) = default;
};

/// A^k mod N by square-and-multiply.
Mat2ModN mat_pow_mod(const CatMap& A, u64 k, u64 N);
/// Exponent given as little-endian 64-bit limbs, any length.
Mat2ModN mat_pow_mod(const CatMap& A, std::span<const u64> k_limbs, u64 N);
Mat2ModN mat_pow(const Mat2ModN& M, u64 k);

/// Least k >= 1 with A^k = I mod N by repeated multiplication. ord(A,1) = 1.
u64 ord_brute(const CatMap& A, u64 N);

/// Exact order given A^m = I mod N: strip prime factors of m.
/// Throws NotAMultiple when A^m != I mod N.
u64 order_dividing(const CatMap& A, u64 N, u64 m, const FactorOptions& options = {});
u64 order_dividing(const CatMap& A, u64 N, const Factorization& m);

/// ord(A, p^k). Unramified primes reduce the multiple p^{k-1}(p - chi(p));
/// ramified primes use brute force at p and lift one power at a time.
u64 ord_prime_power(const CatMap& A, u64 p, int k, const FactorOptions& options = {});

/// ord(A, N) as the lcm of prime-power orders.
u64 ord(const CatMap& A, u64 N, const FactorOptions& options = {});

/// Lifts ord(A, p^{k-1}) = prev to ord(A, p^k), which is prev or p * prev.
u64 lift_order(const CatMap& A, u64 p, u64 prime_power, u64 prev);

/// Kronecker-style character of the splitting field: 0 for p | D_A, else the
/// Legendre symbol of tr^2 - 4 mod p. p must be prime (unchecked here).
int splitting_character(const CatMap& A, u64 p);

}  // namespace catmap
