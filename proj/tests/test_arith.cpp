#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "catmap/arith.hpp"
#include "support.hpp"

using namespace catmap;
using test::cat;
using test::error_of;

TEST_CASE("validate_map") {
  const CatMap& A = cat();
  CHECK(A.trace == 4);
  CHECK(A.discriminant == 48);
  CHECK(A.to_string() == "2,1,3,2");
  CHECK(error_of([] { validate_map(1, 1, 0, 1); }) == Errc::NotHyperbolic);
  CHECK(error_of([] { validate_map(1, 1, 1, 2); }) == Errc::NotQuantizable);
  CHECK(error_of([] { validate_map(2, 1, 1, 2); }) == Errc::NotUnimodular);
  CHECK(parse_map(" 2, 1,3 ,2") == A);
  CHECK(error_of([] { parse_map("2,1,3"); }) == Errc::InvalidArgument);
}

TEST_CASE("mat_pow_mod") {
  const CatMap& A = cat();
  CHECK(mat_pow_mod(A, 0, 7).is_identity());
  CHECK(mat_pow_mod(A, 3, 5).is_identity());
  const Mat2ModN m = mat_pow_mod(A, 4, 7);
  CHECK(m.is_minus_identity());
  CHECK(m.a == 6);
  CHECK(m.d == 6);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 40; ++t) {
    const u64 N = 2 + rng() % 500;
    const u64 k = rng() % 60;
    const auto P = oracle::power(test::m2(A), k, static_cast<i64>(N));
    const Mat2ModN M = mat_pow_mod(A, k, N);
    CHECK(oracle::M2{i64(M.a), i64(M.b), i64(M.c), i64(M.d)} == P);
  }
}

TEST_CASE("factorize") {
  CHECK(factorize(1).empty());
  const Factorization f = factorize(50);
  REQUIRE(f.size() == 2);
  CHECK(f.factors[0] == PrimePower{2, 1});
  CHECK(f.factors[1] == PrimePower{5, 2});

  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const u64 n = 1 + rng() % 1'000'000'000'000ULL;
    const Factorization g = factorize(n);
    CHECK(g.value() == n);
    std::vector<std::pair<u64, int>> got;
    for (const auto& p : g.factors) got.emplace_back(p.prime, p.exponent);
    CHECK(got == oracle::factor(n));
  }
  // Products of two large primes exercise the rho path past trial division.
  CHECK(factorize(1000003ULL * 999999937ULL).size() == 2);
}

TEST_CASE("det(A^40 - I) factors back to itself") {
  // tr(A^40) by the trace recurrence, in 128 bits.
  i128 t0 = 2, t1 = 4;
  for (int k = 2; k <= 40; ++k) {
    const i128 t2 = 4 * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  const u128 det = static_cast<u128>(t1 - 2);
  CHECK(to_string(det) == "75492168629825517411072");
  const WideFactorization f = factorize_wide(det);
  CHECK(f.value() == det);
  CHECK(f.certified);
  for (const auto& p : f.factors) CHECK(is_prime_wide(p.prime).prime);
}

TEST_CASE("ord_brute") {
  const CatMap& A = cat();
  CHECK(ord_brute(A, 1) == 1);
  CHECK(ord_brute(A, 5) == 3);
  CHECK(ord_brute(A, 7) == 8);
}

TEST_CASE("ord") {
  const CatMap& A = cat();
  CHECK(ord(A, 55) == 30);
  CHECK(ord(A, 11) == 10);
  CHECK(ord(A, 3) == 6);
  CHECK(ord(A, 1) == 1);
  for (u64 N = 1; N <= 400; ++N) CHECK(ord(A, N) == oracle::order(test::m2(A), static_cast<i64>(N)));

  const CatMap B = validate_map(3, 2, 4, 3);
  for (u64 N = 1; N <= 200; ++N) CHECK(ord(B, N) == oracle::order(test::m2(B), static_cast<i64>(N)));
}

TEST_CASE("order_dividing") {
  const CatMap& A = cat();
  CHECK(order_dividing(A, 11, 10) == 10);
  CHECK(order_dividing(A, 5, 6) == 3);
  CHECK(order_dividing(A, 1, 1) == 1);
  CHECK(error_of([&] { order_dividing(A, 11, 4); }) == Errc::NotAMultiple);
}

TEST_CASE("ord_prime_power and lift_order") {
  const CatMap& A = cat();
  for (u64 p : {5, 7, 11, 13}) {
    u64 q = p, prev = ord(A, p);
    for (int k = 2; k <= 3; ++k) {
      q *= p;
      const u64 expect = oracle::order(test::m2(A), static_cast<i64>(q));
      CHECK(ord_prime_power(A, p, k) == expect);
      CHECK(lift_order(A, p, q, prev) == expect);
      prev = expect;
    }
  }
}

TEST_CASE("splitting_character") {
  const CatMap& A = cat();
  CHECK(splitting_character(A, 11) == 1);
  CHECK(splitting_character(A, 2) == 0);
  CHECK(splitting_character(A, 5) == -1);
  for (u64 p = 2; p < 400; ++p)
    if (oracle::prime(p)) CHECK(splitting_character(A, p) == oracle::chi(test::m2(A), static_cast<i64>(p)));
}
