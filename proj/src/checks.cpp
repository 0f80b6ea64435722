#include "catmap/checks.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "catmap/census.hpp"
#include "catmap/store.hpp"

namespace catmap {

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw CheckFailure(what);
}

template <class... Parts>
std::string cat(const Parts&... parts) {
  std::ostringstream ss;
  (ss << ... << parts);
  return ss.str();
}

bool squarefree(u64 n) {
  for (const auto& [p, e] : factorize(n).factors)
    if (e > 1) return false;
  return true;
}

u64 disc_abs(const CatMap& A) { return static_cast<u64>(std::llabs(A.discriminant)); }

struct Context {
  const CheckOptions& opt;
  std::mt19937_64 rng;
  const CatMap& A() const { return opt.A; }
  u64 pick(u64 lo, u64 hi) { return std::uniform_int_distribution<u64>(lo, hi)(rng); }
  u64 scale(u64 full, u64 quick) const { return opt.quick ? quick : full; }
};

using CheckFn = std::string (*)(Context&);

// --- core arithmetic -------------------------------------------------------

std::string check_validation(Context&) {
  auto code = [](i64 a, i64 b, i64 c, i64 d) {
    try {
      validate_map(a, b, c, d);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  require(code(2, 1, 3, 3) == Errc::NotUnimodular, "det != 1 accepted");
  require(code(1, 1, 0, 1) == Errc::NotHyperbolic, "parabolic map accepted");
  require(code(1, 1, 1, 2) == Errc::NotQuantizable, "parity violation accepted");
  CatMap A = validate_map(2, 1, 3, 2);
  require(A.trace == 4 && A.discriminant == 48, "trace or discriminant of (2,1,3,2)");
  return "error classes and metadata";
}

std::string check_ord_brute(Context& ctx) {
  const u64 limit = ctx.scale(2000, 300);
  for (u64 N = 1; N <= limit; ++N) {
    require(ord(ctx.A(), N) == ord_brute(ctx.A(), N), cat("ord != ord_brute at N = ", N));
  }
  return cat("N <= ", limit);
}

std::string check_ord_lcm(Context& ctx) {
  const u64 pairs = ctx.scale(200, 50);
  u64 done = 0;
  while (done < pairs) {
    u64 M = ctx.pick(1, 70), N = ctx.pick(1, 5000 / M);
    if (gcd(M, N) != 1) continue;
    require(ord(ctx.A(), M * N) == checked_lcm(ord(ctx.A(), M), ord(ctx.A(), N)), cat("lcm rule fails at ", M, "*", N));
    ++done;
  }
  return cat(pairs, " coprime pairs, MN <= 5000");
}

std::string check_ord_divides(Context& ctx) {
  const u64 limit = ctx.scale(100'000, 10'000);
  const FactorSieve sieve(limit);
  u64 count = 0;
  for (u64 p = 2; p <= limit; ++p) {
    if (!sieve.is_prime(p) || disc_abs(ctx.A()) % p == 0) continue;
    const u64 m = chi(ctx.A(), p) == 1 ? p - 1 : p + 1;
    require(m % ord(ctx.A(), p) == 0, cat("ord(A,", p, ") does not divide p - chi(p)"));
    ++count;
  }
  u64 powers = 0;
  for (u64 p = 2; p * p <= 10'000; ++p) {
    if (!sieve.is_prime(p) || disc_abs(ctx.A()) % p == 0) continue;
    u64 pk = p;
    for (int k = 1; pk <= 10'000; ++k, pk *= p) {
      const u64 bound = pk / p * (chi(ctx.A(), p) == 1 ? p - 1 : p + 1);
      require(bound % ord(ctx.A(), pk) == 0, cat("ord(A,", pk, ") does not divide p^(k-1)(p - chi(p))"));
      ++powers;
    }
  }
  return cat(count, " primes <= ", limit, ", ", powers, " prime powers <= 10^4");
}

std::string check_mat_pow(Context& ctx) {
  for (int trial = 0; trial < 50; ++trial) {
    const u64 N = ctx.pick(2, u64{1} << 40);
    const u64 i = ctx.rng(), j = ctx.rng();
    const u128 sum = static_cast<u128>(i) + j;
    const u64 limbs[2] = {static_cast<u64>(sum), static_cast<u64>(sum >> 64)};
    require(mat_pow_mod(ctx.A(), i, N) * mat_pow_mod(ctx.A(), j, N) == mat_pow_mod(ctx.A(), limbs, N),
            cat("A^i A^j != A^(i+j) mod ", N));
  }
  return "50 random exponent pairs below 2^64";
}

std::string check_factorization(Context& ctx) {
  for (int trial = 0; trial < 200; ++trial) {
    const u64 n = ctx.pick(1, u64{1} << 62);
    const Factorization f = factorize(n);
    require(f.value() == n, cat("factors of ", n, " do not multiply back"));
    for (std::size_t i = 0; i < f.size(); ++i) {
      require(is_prime(f.factors[i].prime), cat("composite factor of ", n));
      require(i == 0 || f.factors[i - 1].prime < f.factors[i].prime, "factors not sorted");
    }
  }
  const SmallOrderFactorization k40 = small_order_N(ctx.A(), 40);
  u128 product = 1;
  const WideFactorization wf = factorize_wide(k40.det_val);
  for (const auto& [p, e] : wf.factors) {
    require(is_prime_wide(p).prime, "composite factor of det(A^40 - I)");
    for (int i = 0; i < e; ++i) product *= p;
  }
  require(product == k40.det_val, "det(A^40 - I) factors do not multiply back");
  return "200 random 62-bit integers and det(A^40 - I)";
}

// --- quadratic order -------------------------------------------------------

std::string check_chi_character(Context& ctx) {
  const u64 D = disc_abs(ctx.A());
  const FactorSieve sieve(10'000);
  std::map<u64, int> by_class;
  for (u64 p = 2; p <= 10'000; ++p) {
    if (!sieve.is_prime(p)) continue;
    const int x = chi(ctx.A(), p);
    require((x == 0) == (D % p == 0), cat("chi(", p, ") = 0 mismatch"));
    if (x == 0) continue;
    auto [it, inserted] = by_class.emplace(p % D, x);
    require(inserted || it->second == x, cat("chi is not a function of p mod D_A at p = ", p));
  }
  return cat(by_class.size(), " residue classes mod D_A");
}

std::string check_norm_one(Context& ctx) {
  const u64 limit = ctx.scale(2000, 500);
  const FactorSieve sieve(limit);
  u64 powers = 0;
  for (u64 p = 2; p <= limit; ++p) {
    if (!sieve.is_prime(p) || disc_abs(ctx.A()) % p == 0) continue;
    for (u64 pk = p; pk <= limit; pk *= p) {
      const u64 formula = pk / p * (chi(ctx.A(), p) == 1 ? p - 1 : p + 1);
      require(norm_one_count(ctx.A(), pk) == formula, cat("#C_A(", pk, ") != p^(k-1)(p - chi(p))"));
      ++powers;
    }
  }
  const u64 pairs = ctx.scale(100, 20);
  u64 done = 0;
  while (done < pairs) {
    u64 M = ctx.pick(1, 100), N = ctx.pick(1, 10'000 / M);
    if (gcd(M, N) != 1) continue;
    require(norm_one_count(ctx.A(), M * N) == norm_one_count(ctx.A(), M) * norm_one_count(ctx.A(), N),
            cat("norm-one count not multiplicative at ", M, "*", N));
    ++done;
  }
  return cat(powers, " prime powers <= ", limit, ", ", pairs, " CRT pairs");
}

std::string check_ord_torus(Context& ctx) {
  const u64 limit = ctx.scale(2000, 300);
  for (u64 N = 1; N <= limit; ++N) {
    require(ord(ctx.A(), N) <= norm_one_group_order(ctx.A(), N), cat("ord(A,", N, ") > #C_A(N)"));
  }
  return cat("N <= ", limit);
}

std::string check_script_L(Context& ctx) {
  require(script_L(std::vector<u64>{6, 10, 15}) == 30, "L({6,10,15}) != 30");
  const u64 trials = ctx.scale(1000, 200);
  for (u64 t = 0; t < trials; ++t) {
    const std::size_t len = static_cast<std::size_t>(ctx.pick(1, 5));
    std::vector<u64> m(len), n(len);
    for (std::size_t i = 0; i < len; ++i) {
      m[i] = ctx.pick(1, 60);
      n[i] = m[i] * ctx.pick(1, 20);
    }
    require(script_L(n) % script_L(m) == 0, "L(M) does not divide L(N) for m_j | n_j");
  }
  return cat(trials, " random list pairs");
}

std::string check_order_profile(Context& ctx) {
  const u64 limit = ctx.scale(5000, 1000);
  for (u64 N = 1; N <= limit; ++N) {
    const OrderProfile p = order_profile(ctx.A(), N);
    require(p.d * p.s * p.s == N && squarefree(p.d), cat("N != d s^2 at ", N));
    require(squarefree(p.d0) && gcd(p.d0, disc_abs(ctx.A())) == 1, cat("d0 not coprime to D_A at ", N));
    u64 torus = 1;
    for (const auto& [q, e] : factorize(p.d0).factors) torus *= chi(ctx.A(), q) == 1 ? q - 1 : q + 1;
    require(torus % p.L == 0, cat("L(N) does not divide the torus product at ", N));
    require(p.bound_holds() && p.ord >= p.lower_bound, cat("ord below the L(N) bound at ", N));
  }
  return cat("N <= ", limit);
}

std::string check_class_split(Context& ctx) {
  const u64 limit = ctx.scale(2000, 400);
  for (u64 N = 1; N <= limit; ++N) {
    const ClassSplit s = split_by_class(ctx.A(), N, 0.55);
    require(s.good * s.bad == N && s.bad % s.terrible == 0, cat("N != N_G N_B or N_T does not divide N_B at ", N));
    for (const auto& [p, e] : factorize(N).factors) {
      const PrimeClass c = classify_prime(ctx.A(), p, 0.55);
      require((c == PrimeClass::Good) == (s.good % p == 0), cat("prime ", p, " in the wrong part of ", N));
      require((c == PrimeClass::Terrible) == (s.terrible % p == 0), cat("terrible prime ", p, " misplaced in ", N));
    }
  }
  return cat("N <= ", limit, ", eta = 0.55");
}

u64 trivial_by_enumeration(u64 r, std::optional<u64> t) {
  u64 count = 0;
  for (u64 i = 0; i < r; ++i)
    for (u64 j = 0; j < r; ++j)
      for (u64 k = 0; k < r; ++k)
        for (u64 l = 0; l < r; ++l) {
          bool f1 = i == j && k == l;
          bool f2 = i == l && j == k;
          bool f3 = t && i == (k + *t) % r && j == (l + *t) % r;
          count += f1 || f2 || f3;
        }
  return count;
}

std::string check_nu_primes(Context& ctx) {
  const u64 D = disc_abs(ctx.A());
  u64 tested = 0;
  for (u64 p = 2; p <= 50; ++p) {
    if (!is_prime(p) || D % p == 0) continue;
    for (Vec2 n : {Vec2{1, 0}, Vec2{0, 1}, Vec2{1, 2}}) {
      const i64 det = independence_det(ctx.A(), n);
      if (det % static_cast<i64>(p) == 0) continue;
      const NuCount nu = count_nu(ctx.A(), p, n);
      const u64 r = nu.r;
      require(nu.nu == count_nu_brute(ctx.A(), p, n), cat("fast nu != brute nu at p = ", p));
      require(nu.nu <= 3 * r * r, cat("nu > 3 r^2 at p = ", p));
      require(nu.nu >= 2 * r * r - r, cat("nu < 2 r^2 - r at p = ", p));
      require(nu.trivial_count == trivial_by_enumeration(r, nu.minus_one_exponent),
              cat("trivial count mismatch at p = ", p));
      require(nu.trivial_count <= nu.nu && nu.nu <= r * r * r * r, cat("nu outside [trivial, r^4] at p = ", p));
      ++tested;
    }
  }
  return cat(tested, " (p, n) pairs with p <= 50");
}

std::string check_nu_squarefree(Context& ctx) {
  const u64 D = disc_abs(ctx.A());
  u64 tested = 0;
  for (u64 N = 2; N <= 200; ++N) {
    if (!squarefree(N) || gcd(N, D) != 1) continue;
    for (Vec2 n : {Vec2{1, 0}, Vec2{0, 1}, Vec2{1, 2}}) {
      const i64 det = independence_det(ctx.A(), n);
      const Factorization f = factorize(N);
      bool independent = true;
      for (const auto& [p, e] : f.factors) independent = independent && det % static_cast<i64>(p) != 0;
      if (!independent) continue;
      const NuCount nu = count_nu(ctx.A(), N, n);
      u64 three = 1;
      for (std::size_t i = 0; i < f.size(); ++i) three *= 3;
      require(nu.nu <= three * nu.r * nu.r, cat("nu > 3^omega r^2 at N = ", N));
      ++tested;
    }
  }
  return cat(tested, " (N, n) pairs, squarefree N <= 200");
}

std::string check_small_order(Context& ctx) {
  const int k_max = ctx.opt.quick ? 20 : 40;
  int rows = 0;
  for (int k = 1; k <= k_max; ++k) {
    const SmallOrderFactorization f = small_order_N(ctx.A(), k);
    for (const auto& p : f.primes) {
      if (p.type != SplitType::Ramified) require(p.exponent % 2 == 0, cat("odd unramified exponent at k = ", k));
      require(p.retained <= p.contributed, "correction grew N_k");
    }
    require(f.size_bounds_hold, cat("N_k <= det <= N_k^2 delta fails at k = ", k));
    require(mat_pow_mod(ctx.A(), static_cast<u64>(k), f.n_k).is_identity(), cat("A^k != I mod N_k at k = ", k));
    require(k % ord(ctx.A(), f.n_k) == 0, cat("ord(A, N_k) does not divide k at k = ", k));
    rows += f.n_k > 1;
  }
  return cat(rows, " nondegenerate k <= ", k_max);
}

// --- quantum engine --------------------------------------------------------

std::string check_translation(Context& ctx) {
  const u64 limit = ctx.scale(300, 60);
  for (u64 N = 1; N <= limit; N += (N < 40 ? 1 : 37)) {
    for (Vec2 n : {Vec2{1, 0}, Vec2{0, 1}, Vec2{3, -5}, Vec2{static_cast<i64>(N) + 1, 2}}) {
      require(unitarity_defect(translation(N, n)) <= 1e-10, cat("T_N(n) not unitary at N = ", N));
    }
  }
  return cat("sampled N <= ", limit);
}

std::string check_heisenberg(Context& ctx) {
  const u64 limit = ctx.scale(20, 10);
  for (u64 N = 1; N <= limit; ++N) {
    const Operator t1 = translation(N, {1, 0}), t2 = translation(N, {0, 1});
    const i64 m = static_cast<i64>(N);
    for (i64 a = 0; a <= m; ++a) {
      for (i64 b = 0; b <= m; ++b) {
        const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(a * b) / static_cast<double>(N));
        const Operator lhs = translation(N, {a, 0}) * translation(N, {0, b});
        const Operator rhs = e * (translation(N, {0, b}) * translation(N, {a, 0}));
        require(max_abs(lhs - rhs) <= 1e-10, cat("Heisenberg relation fails at N = ", N));
      }
    }
    require(max_abs(translation(N, {3, 0}) - t1 * t1 * t1) <= 1e-10, "t1^3 != T(3,0)");
    require(max_abs(translation(N, {0, 2}) - t2 * t2) <= 1e-10, "t2^2 != T(0,2)");
  }
  return cat("N <= ", limit, ", a, b <= N");
}

std::string check_operator_algebra(Context& ctx) {
  const u64 limit = ctx.scale(20, 8);
  for (u64 N = 1; N <= limit; ++N) {
    const i64 m = static_cast<i64>(N);
    for (i64 n1 = -2; n1 <= 2; ++n1)
      for (i64 n2 = -2; n2 <= 2; ++n2) {
        const Operator T = translation(N, {n1, n2});
        require(max_abs(T.adjoint() - translation(N, {-n1, -n2})) <= 1e-10, cat("T* != T(-n) at N = ", N));
        for (i64 m1 = -2; m1 <= 2; ++m1)
          for (i64 m2 = -2; m2 <= 2; ++m2) {
            const double omega = static_cast<double>(m1 * n2 - m2 * n1);
            const Complex e = std::polar(1.0, std::numbers::pi * omega / static_cast<double>(N));
            const Operator lhs = translation(N, {m1, m2}) * T;
            require(max_abs(lhs - e * translation(N, {m1 + n1, m2 + n2})) <= 1e-10,
                    cat("composition rule fails at N = ", N));
          }
      }
    for (i64 n1 = -2 * m; n1 <= 2 * m; ++n1)
      for (i64 n2 = -2 * m; n2 <= 2 * m; ++n2) {
        const double t = std::abs(trace_translation(N, {n1, n2}));
        const bool zero = n1 % m == 0 && n2 % m == 0;
        require(zero ? std::abs(t - static_cast<double>(N)) <= 1e-8 : t <= 1e-8, cat("trace dichotomy fails at N = ", N));
      }
  }
  return cat("N <= ", limit);
}

std::string check_weyl(Context& ctx) {
  (void)ctx;
  for (u64 N : {1, 2, 5, 12, 31}) {
    const Observable c = Observable::constant(Complex(2.5, -1.0));
    require(max_abs(weyl_quantize(N, c) - Complex(2.5, -1.0) * Operator::Identity(N, N)) <= 1e-14, "constant symbol");
    Observable f = Observable::cos1();
    f.add({2, 3}, Complex(0.5, 0.25));
    f.add({-2, -3}, Complex(0.5, -0.25));
    require(f.real_valued(), "real observable flagged complex");
    require(hermiticity_defect(weyl_quantize(N, f)) <= 1e-10, cat("Op_N(f) not Hermitian at N = ", N));
    require(max_abs(weyl_quantize(N, Observable::mode({1, 2})) - translation(N, {1, 2})) <= 1e-14, "single mode");
  }
  return "constants, single modes, real trigonometric polynomials";
}

std::string check_propagator(Context& ctx) {
  const u64 limit = ctx.scale(41, 20);
  u64 fast = 0;
  for (u64 N = 2; N <= limit; ++N) {
    require(intertwiner_solution_dimension(ctx.A(), N) == 1, cat("intertwiner space not one-dimensional at N = ", N));
    const Operator U = propagator(ctx.A(), N);
    require(unitarity_defect(U) <= 1e-10, cat("U not unitary at N = ", N));
    require(egorov_residual(U, ctx.A(), 3) <= 1e-9, cat("Egorov residual above 1e-9 at N = ", N));
    if (fast_path_applies(ctx.A(), N)) {
      const Operator V = propagator(ctx.A(), N, PropagatorPath::Intertwiner);
      require(max_abs(U - V) <= 1e-9, cat("fast and intertwiner paths disagree at N = ", N));
      ++fast;
    }
  }
  return cat("N in [2, ", limit, "], ", fast, " fast-path cross-checks");
}

std::string check_spectrum(Context& ctx) {
  const u64 limit = ctx.scale(101, 31);
  u64 count = 0;
  for (u64 N = 5; N <= limit; N += (ctx.opt.quick ? 1 : 2)) {
    const QuantumModel m = build_model(ctx.A(), N);
    require(m.eig.total_multiplicity() == static_cast<int>(N), cat("multiplicities do not sum to N at N = ", N));
    require(m.eig.max_residual <= 1e-8, cat("eigen residual above 1e-8 at N = ", N));
    require(m.eig.orthonormality_defect <= 1e-10, cat("basis not orthonormal at N = ", N));
    require(m.eig.rstar <= 2 * m.order, cat("r* > 2 ord at N = ", N));
    ++count;
  }
  for (u64 N : {2, 3, 4, 5, 7, 8, 9}) {
    const QuantumModel m = build_model(ctx.A(), N);
    for (const auto& e : m.eig.spaces) {
      const Operator P = spectral_projector(m.U, m.eig.rstar, m.eig.phase, e.index);
      require(max_abs(P * P - P) <= 1e-8, cat("projector not idempotent at N = ", N));
      require(std::abs(P.trace() - Complex(e.multiplicity)) <= 1e-6, cat("trace P_j != multiplicity at N = ", N));
    }
  }
  return cat(count, " dimensions up to ", limit, " plus explicit projectors for N <= 9");
}

std::string check_basis_rotation(Context& ctx) {
  u64 nondegenerate = 0;
  for (u64 N : {5, 7, 11, 13, 35}) {
    const QuantumModel m = build_model(ctx.A(), N);
    const Spectrum rotated = rotate_within_eigenspaces(m.eig, ctx.rng());
    const Operator T = translation(N, {1, 0});
    const FourthMoment before = fourth_moment(m.eig, ctx.A(), {1, 0});
    const FourthMoment after = fourth_moment(rotated, ctx.A(), {1, 0});
    require(after.S4 <= after.bound * (1 + 1e-6) + 1e-10, cat("rotated basis breaks the fourth-moment bound at N = ", N));
    const auto d0 = diagonal_elements(T, m.eig);
    const auto d1 = diagonal_elements(T, rotated);
    std::size_t at = 0;
    bool all_simple = true;
    for (const auto& e : m.eig.spaces) {
      Complex s0 = 0.0, s1 = 0.0;
      for (int i = 0; i < e.multiplicity; ++i, ++at) {
        s0 += d0[at];
        s1 += d1[at];
      }
      require(std::abs(s0 - s1) <= 1e-8, cat("eigenspace trace of the compression changed at N = ", N));
      all_simple = all_simple && e.multiplicity == 1;
    }
    if (all_simple) {
      require(std::abs(before.S4 - after.S4) <= 1e-8, cat("S4 changed in a simple spectrum at N = ", N));
      ++nondegenerate;
    }
  }
  return cat("bound and compression traces under random rotation; ", nondegenerate, " simple spectra invariant");
}

std::string check_expectations(Context& ctx) {
  Observable f = Observable::cos1();
  f.add({1, 1}, Complex(0.3, 0.1));
  f.add({-1, -1}, Complex(0.3, -0.1));
  for (u64 N : {5, 11, 16, 23}) {
    const QuantumModel m = build_model(ctx.A(), N);
    const Operator op = weyl_quantize(N, f);
    const Operator basis = m.eig.eigenbasis();
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      const Complex v = expectation(op, basis.col(j));
      require(std::abs(v.imag()) <= 1e-10, cat("expectation not real at N = ", N));
      require(std::abs(expectation(translation(N, {1, 0}), basis.col(j))) <= 1 + 1e-12, "matrix element above 1");
    }
    require(std::abs(expectation(Operator::Identity(N, N), basis.col(0)) - 1.0) <= 1e-12, "identity expectation");
  }
  bool threw = false;
  try {
    expectation(Operator::Identity(3, 3), StateVector::Constant(3, 2.0));
  } catch (const Error& e) {
    threw = e.code() == Errc::NotNormalized;
  }
  require(threw, "unnormalized state accepted");
  return "real symbols give real expectations";
}

std::string check_fourth_moment(Context& ctx) {
  u64 count = 0;
  for (u64 p = 2; p <= 47; ++p) {
    if (!is_prime(p)) continue;
    const FourthMoment fm = fourth_moment(ctx.A(), p, {1, 0});
    require(fm.S4 <= fm.bound * (1 + 1e-6) + 1e-10, cat("S4 above the nu bound at N = ", p));
    require(fm.max_term <= fm.S4 + 1e-15, "largest term above the sum");
    require(fm.nu == count_nu_brute(ctx.A(), p, {1, 0}), cat("nu disagrees with brute force at N = ", p));
    ++count;
  }
  return cat(count, " primes <= 47, n = (1,0)");
}

// --- census ----------------------------------------------------------------

std::string csv_of(const std::string& kind, const std::vector<Row>& rows) {
  Table t{kind, {{"matrix", "check"}}, rows};
  std::string out = header_text(t, Format::Csv);
  for (const auto& r : rows) out += row_text(kind, r, Format::Csv);
  return out;
}

template <class R>
std::vector<Row> rows_of(const std::vector<R>& records) {
  std::vector<Row> out;
  for (const auto& r : records) out.push_back(to_row(r));
  return out;
}

std::string check_census_records(Context& ctx) {
  const u64 x = ctx.scale(2000, 500);
  const auto ints = integer_records(ctx.A(), 0, x, 0.55, ctx.opt.workers);
  require(ints.size() == x - 1, "integer census skipped a modulus");
  for (const auto& r : ints) {
    require(r.ord >= r.lower_bound, cat("ord below lower bound at N = ", r.N));
    require(r.NG * r.NB == r.N && r.NB % r.NT == 0, cat("class split broken at N = ", r.N));
    require(r.ord == ord(ctx.A(), r.N), cat("cached order wrong at N = ", r.N));
  }
  const double eta = 0.52;
  const auto primes = prime_records(ctx.A(), 0, x, x, eta, ctx.opt.workers);
  for (const auto& r : primes) {
    require(r.cls == classify_prime(ctx.A(), r.p, eta), cat("class mismatch at p = ", r.p));
    require(!r.exceeds || static_cast<double>(r.ord) > std::pow(static_cast<double>(x), eta), "exceeds flag wrong");
    require(r.ord == ord(ctx.A(), r.p), cat("prime order wrong at p = ", r.p));
  }
  for (const auto& row : small_order_report(ctx.A(), 12, ctx.opt.workers)) {
    require(row.status.empty() && row.ord <= static_cast<u64>(row.k), cat("small-order row violates ord <= k at k = ", row.k));
  }
  return cat("integers and primes up to ", x);
}

std::string check_determinism(Context& ctx) {
  const u64 x = ctx.scale(20'000, 5'000);
  const auto serial = integer_records(ctx.A(), 0, x, 0.55, 1);
  const auto parallel = integer_records(ctx.A(), 0, x, 0.55, 4);
  require(csv_of("integers", rows_of(serial)) == csv_of("integers", rows_of(parallel)), "integer census differs with 4 workers");
  require(to_json(summarize_integers(serial, x, 0.55)) == to_json(summarize_integers(parallel, x, 0.55)),
          "integer summary differs with 4 workers");
  const auto p1 = prime_records(ctx.A(), 0, x, x, 0.52, 1);
  const auto p4 = prime_records(ctx.A(), 0, x, x, 0.52, 4);
  require(csv_of("primes", rows_of(p1)) == csv_of("primes", rows_of(p4)), "prime census differs with 4 workers");
  SweepConfig config;
  config.N_list = {5, 7, 9, 11, 13};
  config.workers = 1;
  const auto s1 = quantum_sweep(ctx.A(), config);
  config.workers = 4;
  const auto s4 = quantum_sweep(ctx.A(), config);
  require(csv_of("sweep", rows_of(s1)) == csv_of("sweep", rows_of(s4)), "sweep differs with 4 workers");
  require(csv_of("sweep", rows_of(s1)) == csv_of("sweep", rows_of(quantum_sweep(ctx.A(), config))), "sweep not repeatable");
  return cat("censuses to ", x, " and a sweep, 1 vs 4 workers");
}

std::string check_store(Context& ctx) {
  const auto dir = std::filesystem::temp_directory_path() / cat("catmap-check-", ctx.rng());
  std::filesystem::create_directories(dir);
  struct Cleanup {
    std::filesystem::path p;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove_all(p, ec);
    }
  } cleanup{dir};
  const auto ints = integer_records(ctx.A(), 0, 3000, 0.55, ctx.opt.workers);
  for (Format f : {Format::Csv, Format::Json}) {
    Table t{"integers", {{"matrix", ctx.A().to_string()}, {"note", "a;b=c%d"}}, rows_of(ints)};
    const auto path = dir / cat("round.", to_string(f));
    store_results(t, path, f);
    require(load_results(path) == t, cat("round trip changed the table (", to_string(f), ")"));
    Table empty{"sweep", {}, {}};
    store_results(empty, path, f);
    require(load_results(path) == empty, "empty table round trip");

    // Tear the last record in half, then resume.
    Table partial = t;
    partial.rows.resize(1000);
    store_results(partial, path, f);
    {
      std::ofstream torn(path, std::ios::binary | std::ios::app);
      const std::string line = row_text(t.kind, t.rows[1000], f);
      torn << line.substr(0, line.size() / 2);
    }
    auto resumed = resume_results(path, t.kind, t.config, f);
    require(resumed && resumed->rows.size() == 1000, "torn line not dropped on resume");
    const u64 next = row_key(resumed->rows.back());
    require(next == 1001, "resume key is not the last complete record");
    std::vector<Row> rest(t.rows.begin() + 1000, t.rows.end());
    append_rows(path, t.kind, rest, f);
    require(load_results(path) == t, "resumed store differs from a clean run");
    bool mismatch = false;
    try {
      resume_results(path, t.kind, {{"matrix", "other"}}, f);
    } catch (const Error& e) {
      mismatch = e.code() == Errc::SchemaMismatch;
    }
    require(mismatch, "config mismatch not detected");
  }
  return "CSV and JSON round trip, torn-line resume, schema guard";
}

std::string check_sweep(Context& ctx) {
  SweepConfig config;
  for (u64 p = 5; p <= 60; ++p)
    if (is_prime(p)) config.N_list.push_back(p);
  if (ctx.opt.quick) config.N_list.resize(8);
  config.workers = ctx.opt.workers;
  for (const auto& r : quantum_sweep(ctx.A(), config)) {
    require(r.error.empty(), cat("sweep error at N = ", r.N, ": ", r.error));
    require(r.holds && r.ratio <= 1 + 1e-6, cat("sweep invariant fails at N = ", r.N));
    require(std::pow(r.max_dev, 4) <= r.bound * (1 + 1e-6), cat("max_dev^4 above bound at N = ", r.N));
  }
  config.f = Observable::constant(1.5);
  for (const auto& r : quantum_sweep(ctx.A(), config)) {
    require(r.variance <= 1e-24 && r.max_dev <= 1e-12, cat("constant observable deviates at N = ", r.N));
  }
  return cat(config.N_list.size(), " primes in [5, 60]");
}

struct Entry {
  const char* name;
  CheckFn fn;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"map-validation", check_validation},
      {"ord-vs-brute", check_ord_brute},
      {"ord-lcm-composition", check_ord_lcm},
      {"ord-divides-torus", check_ord_divides},
      {"mat-pow-additive", check_mat_pow},
      {"factorization", check_factorization},
      {"chi-character", check_chi_character},
      {"norm-one-count", check_norm_one},
      {"ord-at-most-torus", check_ord_torus},
      {"script-L-divisibility", check_script_L},
      {"order-profile-bound", check_order_profile},
      {"class-split", check_class_split},
      {"nu-primes", check_nu_primes},
      {"nu-squarefree", check_nu_squarefree},
      {"small-order-sequence", check_small_order},
      {"translation-unitary", check_translation},
      {"heisenberg", check_heisenberg},
      {"operator-algebra", check_operator_algebra},
      {"weyl-quantization", check_weyl},
      {"propagator-egorov", check_propagator},
      {"spectrum", check_spectrum},
      {"basis-rotation", check_basis_rotation},
      {"expectations", check_expectations},
      {"fourth-moment", check_fourth_moment},
      {"census-records", check_census_records},
      {"determinism", check_determinism},
      {"store", check_store},
      {"sweep", check_sweep},
  };
  return entries;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.emplace_back(e.name);
  return out;
}

std::vector<CheckResult> run_checks(const CheckOptions& options,
                                    const std::function<void(const CheckResult&)>& on_result) {
  std::vector<CheckResult> out;
  for (const auto& entry : registry()) {
    Context ctx{options, std::mt19937_64(options.seed)};
    CheckResult r;
    r.name = entry.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      r.detail = entry.fn(ctx);
      r.passed = true;
    } catch (const CheckFailure& e) {
      r.detail = e.what();
    } catch (const std::exception& e) {
      r.detail = std::string("unexpected error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace catmap
