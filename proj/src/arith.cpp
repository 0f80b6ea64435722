#include "catmap/arith.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace catmap {

std::string CatMap::to_string() const {
  return std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "," +
         std::to_string(d);
}

CatMap validate_map(i64 a, i64 b, i64 c, i64 d) {
  const std::string name = "(" + std::to_string(a) + "," + std::to_string(b) + "," +
                           std::to_string(c) + "," + std::to_string(d) + ")";
  i128 det = static_cast<i128>(a) * d - static_cast<i128>(b) * c;
  if (det != 1) throw Error(Errc::NotUnimodular, name + " has ad - bc != 1");
  i128 tr = static_cast<i128>(a) + d;
  if (tr >= -2 && tr <= 2) throw Error(Errc::NotHyperbolic, name + " has |trace| <= 2");
  if ((static_cast<i128>(a) * b) % 2 != 0 || (static_cast<i128>(c) * d) % 2 != 0) {
    throw Error(Errc::NotQuantizable, name + " violates ab = cd = 0 mod 2");
  }
  if (tr > (i128{1} << 30) || tr < -(i128{1} << 30)) {
    throw Error(Errc::ValueTooLarge, name + " trace exceeds 2^30");
  }
  CatMap A;
  A.a = a;
  A.b = b;
  A.c = c;
  A.d = d;
  A.trace = static_cast<i64>(tr);
  A.discriminant = 4 * (A.trace * A.trace - 4);
  double t = std::fabs(static_cast<double>(A.trace));
  A.eps_log = std::log((t + std::sqrt(t * t - 4.0)) / 2.0);
  return A;
}

CatMap parse_map(std::string_view text) {
  i64 v[4];
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v[i]);
    if (ec != std::errc{}) throw Error(Errc::InvalidArgument, "matrix must be a,b,c,d: " + std::string(text));
    pos = static_cast<std::size_t>(ptr - text.data());
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (i < 3) {
      if (pos >= text.size() || text[pos] != ',') {
        throw Error(Errc::InvalidArgument, "matrix must be a,b,c,d: " + std::string(text));
      }
      ++pos;
    }
  }
  if (pos != text.size()) throw Error(Errc::InvalidArgument, "trailing text in matrix: " + std::string(text));
  return validate_map(v[0], v[1], v[2], v[3]);
}

Mat2ModN Mat2ModN::identity(u64 modulus) {
  u64 one = 1 % modulus;
  return {modulus, one, 0, 0, one};
}

Mat2ModN Mat2ModN::reduce(const CatMap& A, u64 modulus) {
  if (modulus == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
  if (modulus > (u64{1} << 63)) throw Error(Errc::ValueTooLarge, "modulus above 2^63");
  auto r = [modulus](i64 v) {
    i128 m = static_cast<i128>(v) % static_cast<i128>(modulus);
    if (m < 0) m += modulus;
    return static_cast<u64>(m);
  };
  return {modulus, r(A.a), r(A.b), r(A.c), r(A.d)};
}

bool Mat2ModN::is_identity() const { return *this == identity(modulus); }

bool Mat2ModN::is_minus_identity() const {
  u64 minus_one = (modulus - 1) % modulus;
  return a == minus_one && d == minus_one && b == 0 && c == 0;
}

Mat2ModN Mat2ModN::operator*(const Mat2ModN& r) const {
  const u64 m = modulus;
  auto dot = [m](u64 x, u64 y, u64 z, u64 w) {
    return static_cast<u64>((static_cast<u128>(x) * y + static_cast<u128>(z) * w) % m);
  };
  return {m, dot(a, r.a, b, r.c), dot(a, r.b, b, r.d), dot(c, r.a, d, r.c), dot(c, r.b, d, r.d)};
}

Mat2ModN mat_pow(const Mat2ModN& M, u64 k) {
  Mat2ModN result = Mat2ModN::identity(M.modulus);
  Mat2ModN base = M;
  while (k != 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

Mat2ModN mat_pow_mod(const CatMap& A, u64 k, u64 N) {
  if (N == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
  return mat_pow(Mat2ModN::reduce(A, N), k);
}

Mat2ModN mat_pow_mod(const CatMap& A, std::span<const u64> k_limbs, u64 N) {
  if (N == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
  const Mat2ModN base = Mat2ModN::reduce(A, N);
  Mat2ModN result = Mat2ModN::identity(N);
  for (std::size_t i = k_limbs.size(); i-- > 0;) {
    for (int bit = 63; bit >= 0; --bit) {
      result = result * result;
      if ((k_limbs[i] >> bit) & 1) result = result * base;
    }
  }
  return result;
}

u64 ord_brute(const CatMap& A, u64 N) {
  if (N == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
  if (N == 1) return 1;
  const Mat2ModN base = Mat2ModN::reduce(A, N);
  Mat2ModN power = base;
  u64 k = 1;
  while (!power.is_identity()) {
    power = power * base;
    ++k;
  }
  return k;
}

u64 order_dividing(const CatMap& A, u64 N, const Factorization& m) {
  u64 order = m.value();
  if (!mat_pow_mod(A, order, N).is_identity()) {
    throw Error(Errc::NotAMultiple,
                "A^" + std::to_string(order) + " != I mod " + std::to_string(N));
  }
  for (const auto& [q, e] : m.factors) {
    for (int i = 0; i < e; ++i) {
      if (!mat_pow_mod(A, order / q, N).is_identity()) break;
      order /= q;
    }
  }
  return order;
}

u64 order_dividing(const CatMap& A, u64 N, u64 m, const FactorOptions& options) {
  if (m == 0) throw Error(Errc::InvalidArgument, "multiple must be positive");
  return order_dividing(A, N, factorize(m, options));
}

int splitting_character(const CatMap& A, u64 p) {
  if (static_cast<u64>(std::llabs(A.discriminant)) % p == 0) return 0;
  return legendre(A.trace * A.trace - 4, p);
}

u64 lift_order(const CatMap& A, u64 p, u64 prime_power, u64 prev) {
  return mat_pow_mod(A, prev, prime_power).is_identity() ? prev : checked_mul(prev, p);
}

namespace {

Factorization merge(const Factorization& x, const Factorization& y) {
  Factorization out;
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x.factors[i].prime < y.factors[j].prime)) {
      out.factors.push_back(x.factors[i++]);
    } else if (i == x.size() || y.factors[j].prime < x.factors[i].prime) {
      out.factors.push_back(y.factors[j++]);
    } else {
      out.factors.push_back({x.factors[i].prime, x.factors[i].exponent + y.factors[j].exponent});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

u64 ord_prime_power(const CatMap& A, u64 p, int k, const FactorOptions& options) {
  u64 pk = 1;
  for (int i = 0; i < k; ++i) pk = checked_mul(pk, p);
  const int chi = splitting_character(A, p);
  if (chi != 0) {
    Factorization multiple = factorize(chi == 1 ? p - 1 : p + 1, options);
    if (k > 1) multiple = merge(multiple, Factorization{{{p, k - 1}}, true});
    return order_dividing(A, pk, multiple);
  }
  u64 order = ord_brute(A, p);
  u64 power = p;
  for (int i = 2; i <= k; ++i) {
    power *= p;
    order = lift_order(A, p, power, order);
  }
  return order;
}

u64 ord(const CatMap& A, u64 N, const FactorOptions& options) {
  if (N == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
  if (N > kMaxModulus) throw Error(Errc::ValueTooLarge, "modulus above 2^62");
  u64 result = 1;
  for (const auto& [p, e] : factorize(N, options).factors) {
    result = checked_lcm(result, ord_prime_power(A, p, e, options));
  }
  return result;
}

}  // namespace catmap
