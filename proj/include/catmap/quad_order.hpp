#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "catmap/arith.hpp"

namespace catmap {

enum class SplitType { Split, Inert, Ramified };
std::string_view to_string(SplitType t);

/// chi(p) in {-1, 0, +1}. Throws NotPrime.
int chi(const CatMap& A, u64 p);
SplitType split_type(const CatMap& A, u64 p);

/// #{(x, y) mod M : x^2 + tr*xy + y^2 = 1}, the norm-one elements of
/// Z[eps]/M by direct enumeration. Throws BudgetExceeded above max_modulus.
u64 norm_one_count(const CatMap& A, u64 M, u64 max_modulus = 20'000);

/// #C_A(N) from the closed form p^{k-1}(p - chi(p)) at unramified primes.
/// Ramified prime powers are counted by enumeration (they divide D_A^k and
/// are small for desk-scale N).
u64 norm_one_group_order(const CatMap& A, u64 N);

/// (prod m_j) / lcm(m_j), accumulated as prod of gcd(lcm so far, m_j).
u64 script_L(std::span<const u64> ms);

/// Arithmetic bookkeeping for one modulus: N = d s^2 with d squarefree,
/// d = d0 * gcd(d, D_A), L(N) over p | d0, and the lower bound
/// prod_{p | d0} ord(A, p) / L(N).
struct OrderProfile {
  u64 N = 1;
  u64 d = 1;
  u64 s = 1;
  u64 d0 = 1;
  u64 L = 1;
  u64 ord = 1;
  /// prod_{p | d0} ord(A, p).
  u64 prime_order_product = 1;
  /// floor(prime_order_product / L).
  u64 lower_bound = 1;
  int omega = 0;

  /// ord * L >= prime_order_product, the exact form of ord >= product / L.
  bool bound_holds() const;
  /// N = d s^2 with s <= log N and omega(N) <= (3/2) log log N.
  bool in_generic_set() const;
};

OrderProfile order_profile(const CatMap& A, u64 N, const FactorOptions& options = {});

/// Same bookkeeping from a known factorization of N and a callback giving
/// ord(A, p^k). Used by sweeps that cache prime orders.
template <class PrimePowerOrder>
OrderProfile order_profile_from(const CatMap& A, u64 N, const Factorization& fact,
                                PrimePowerOrder&& prime_power_order);

enum class PrimeClass { Good, Bad, Terrible };
std::string_view to_string(PrimeClass c);

void check_eta(double eta);

/// Classification as a pure function of (p, ord(A, p)).
PrimeClass classify_prime_order(const CatMap& A, u64 p, u64 ord_p, double eta);
/// Throws NotPrime, EtaOutOfRange.
PrimeClass classify_prime(const CatMap& A, u64 p, double eta);

struct ClassSplit {
  u64 good = 1;
  u64 bad = 1;
  u64 terrible = 1;
  double eta = 0.55;
};

ClassSplit split_by_class(const CatMap& A, u64 N, double eta, const FactorOptions& options = {});

struct SmallOrderPrime {
  u128 prime;
  int exponent;  // sigma_p, iota_p or rho_p
  SplitType type;
  int contributed;  // exponent assembled into N_k
  int retained;     // exponent kept after the A^k = I correction
};

struct SmallOrderFactorization {
  int k = 0;
  u128 det_val = 0;  // |det(A^k - I)| = |2 - tr(A^k)|
  std::vector<SmallOrderPrime> primes;
  u64 assembled = 1;  // N_k before correction
  u64 n_k = 1;        // largest divisor of `assembled` with A^k = I mod n_k
  u128 delta = 1;     // product of ramified primes of K
  bool certified = true;
  /// assembled <= det_val <= assembled^2 * delta.
  bool size_bounds_hold = true;
  bool degenerate() const { return n_k == 1; }
};

/// Throws DegenerateK, FactorizationTimeout, ValueTooLarge (det beyond 2^127).
SmallOrderFactorization small_order_N(const CatMap& A, int k, const FactorOptions& options = {});

using Vec2 = std::array<i64, 2>;

struct NuCount {
  u64 N = 0;
  Vec2 n{0, 0};
  u64 r = 0;
  u64 nu = 0;
  u64 trivial_count = 0;
  std::optional<u64> minus_one_exponent;
};

/// Smallest t >= 1 with A^t = -I mod N, if any. Absent for N <= 2 where -I = I.
std::optional<u64> minus_one_exponent(const CatMap& A, u64 N, u64 order);

/// Number of (i,j,k,l) in [1,r]^4 with n(A^i - A^j + A^k - A^l) = 0 mod N,
/// in O(r^2) by pairing the multiset {n(A^i - A^j)} against its negation.
NuCount count_nu(const CatMap& A, u64 N, Vec2 n);
/// The O(r^4) enumeration.
u64 count_nu_brute(const CatMap& A, u64 N, Vec2 n);

/// Size of the union of the trivial families (i,k)=(j,l); i=l, j=k; and,
/// when A^t = -I, (i,j) = (k+t, l+t), all modulo r.
u64 trivial_solution_count(const CatMap& A, u64 N, Vec2 n);
u64 trivial_solution_count(u64 r, bool has_minus_one);

/// 2x2 determinant of the rows n and nA.
i64 independence_det(const CatMap& A, Vec2 n);

// ---------------------------------------------------------------------------

template <class PrimePowerOrder>
OrderProfile order_profile_from(const CatMap& A, u64 N, const Factorization& fact,
                                PrimePowerOrder&& prime_power_order) {
  OrderProfile prof;
  prof.N = N;
  prof.omega = static_cast<int>(fact.size());
  const u64 disc = static_cast<u64>(A.discriminant < 0 ? -A.discriminant : A.discriminant);
  std::vector<u64> torus_orders;
  for (const auto& [p, e] : fact.factors) {
    if (e % 2 == 1) prof.d *= p;
    for (int i = 0; i < e / 2; ++i) prof.s *= p;
    u64 order_pk = prime_power_order(p, e);
    prof.ord = checked_lcm(prof.ord, order_pk);
    if (e % 2 == 1 && disc % p != 0) {
      prof.d0 *= p;
      torus_orders.push_back(splitting_character(A, p) == 1 ? p - 1 : p + 1);
      u64 order_p = e == 1 ? order_pk : prime_power_order(p, 1);
      prof.prime_order_product = checked_mul(prof.prime_order_product, order_p);
    }
  }
  prof.L = torus_orders.empty() ? 1 : script_L(torus_orders);
  prof.lower_bound = prof.prime_order_product / prof.L;
  return prof;
}

}  // namespace catmap
