#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catmap/quad_order.hpp"

namespace catmap {

template <class Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using Operator = CMatrix<double>;
using StateVector = CVector<double>;

struct Tolerances {
  double construction = 1e-10;
  double spectral = 1e-8;
  double relative = 1e-6;
  double multiplicity_guard = 1e-6;
  double normalization = 1e-10;
};

/// A trigonometric polynomial on the torus, f(x) = sum fhat(n) e(n.x).
class Observable {
 public:
  Observable() = default;
  static Observable constant(Complex c);
  static Observable mode(Vec2 n, Complex coefficient = 1.0);
  /// 2 cos(2 pi x1).
  static Observable cos1();
  /// "cos1", or "c:(n1,n2)=re,im;(n1,n2)=re,im;..." (the "c:" prefix is optional).
  static Observable parse(std::string_view text);

  void add(Vec2 n, Complex coefficient);
  const std::map<Vec2, Complex>& coefficients() const { return coeffs_; }
  Complex mean() const;
  bool real_valued(double tol = 1e-14) const;
  /// Canonical form accepted by parse.
  std::string to_string() const;

  friend bool operator==(const Observable&, const Observable&) = default;

 private:
  std::map<Vec2, Complex> coeffs_;
};

namespace detail {
inline i64 mod_i64(i64 v, i64 m) {
  i64 r = v % m;
  return r < 0 ? r + m : r;
}
}  // namespace detail

/// T_N(n) as a dense matrix. The only nonzero in row Q sits in column Q + n1
/// and equals exp(i pi (n1 n2 + 2 n2 Q) / N); the phase index is kept exact
/// modulo 2N.
template <class Real = double>
CMatrix<Real> translation(u64 N, Vec2 n) {
  if (N == 0) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  const i64 m = static_cast<i64>(N);
  const i64 shift = detail::mod_i64(n[0], m);
  const i64 n1 = detail::mod_i64(n[0], 2 * m);
  const i64 n2 = detail::mod_i64(n[1], 2 * m);
  CMatrix<Real> T = CMatrix<Real>::Zero(m, m);
  i64 k = (n1 * n2) % (2 * m);
  const i64 step = (2 * n2) % (2 * m);
  for (i64 q = 0; q < m; ++q) {
    const Real angle = std::numbers::pi_v<Real> * static_cast<Real>(k) / static_cast<Real>(m);
    T(q, (q + shift) % m) = std::polar(Real(1), angle);
    k = (k + step) % (2 * m);
  }
  return T;
}

template <class Real = double>
std::complex<Real> trace_translation(u64 N, Vec2 n) {
  if (N == 0) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  const i64 m = static_cast<i64>(N);
  if (detail::mod_i64(n[0], m) != 0) return 0;
  const i64 n1 = detail::mod_i64(n[0], 2 * m);
  const i64 n2 = detail::mod_i64(n[1], 2 * m);
  std::complex<Real> sum = 0;
  i64 k = (n1 * n2) % (2 * m);
  const i64 step = (2 * n2) % (2 * m);
  for (i64 q = 0; q < m; ++q) {
    sum += std::polar(Real(1), std::numbers::pi_v<Real> * static_cast<Real>(k) / static_cast<Real>(m));
    k = (k + step) % (2 * m);
  }
  return sum;
}

template <class Real = double>
CMatrix<Real> weyl_quantize(u64 N, const Observable& f) {
  if (N == 0) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  CMatrix<Real> op = CMatrix<Real>::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (const auto& [n, c] : f.coefficients()) {
    op += std::complex<Real>(static_cast<Real>(c.real()), static_cast<Real>(c.imag())) * translation<Real>(N, n);
  }
  return op;
}

/// Row vector n times A.
Vec2 act(const CatMap& A, Vec2 n);

/// (1/N) sum phi(Q) conj(psi(Q)).
Complex inner(const StateVector& phi, const StateVector& psi);

double max_abs(const Operator& M);
/// ||M* M - I||_max.
double unitarity_defect(const Operator& M);
double hermiticity_defect(const Operator& M);

enum class PropagatorPath { Auto, Fast, Intertwiner };

/// Whether the Gauss-sum kernel applies: N odd and gcd(c, N) = 1.
bool fast_path_applies(const CatMap& A, u64 N);

/// Unitary U with U* T_N(n) U = T_N(nA), phase-normalized so the first
/// largest-magnitude entry of column 0 is positive real.
/// Throws ConstructionFailed, NotUnitary, InvalidArgument (Fast requested
/// where the kernel does not apply).
Operator propagator(const CatMap& A, u64 N, PropagatorPath path = PropagatorPath::Auto,
                    const Tolerances& tol = {});

/// Dimension of the solution space of T_N(n) U = U T_N(nA) for n = (1,0), (0,1).
std::size_t intertwiner_solution_dimension(const CatMap& A, u64 N);

/// Multiplies U by a unit scalar so the first entry of column 0 within
/// 1e-9 relative of the column maximum is positive real.
void normalize_phase(Operator& U);

/// max over nonzero n with |n|_inf <= n_max of ||U* T(n) U - T(nA)||_max.
double egorov_residual(const Operator& U, const CatMap& A, int n_max);

struct Eigenspace {
  int index = 0;  // j in lambda_j = e^{i(phi + 2 pi j)/r*}
  Complex eigenvalue;
  int multiplicity = 0;
  /// N x multiplicity, columns orthonormal for the normalized inner product.
  Operator basis;
};

struct Spectrum {
  u64 N = 0;
  u64 rstar = 0;
  double phase = 0.0;  // U^{r*} = e^{i phase} I
  std::vector<Eigenspace> spaces;
  double max_residual = 0.0;
  double orthonormality_defect = 0.0;

  int total_multiplicity() const;
  /// All basis vectors side by side, N x N.
  Operator eigenbasis() const;
};

struct SpectrumOptions {
  Tolerances tol;
  std::uint64_t seed = 0x5eed5eedULL;
  int oversample = 4;
};

/// Throws NoScalarPower, NonIntegralMultiplicity, ConstructionFailed.
Spectrum spectrum(const Operator& U, u64 r_hint, const SpectrumOptions& options = {});

/// (1/r*) sum_k lambda_j^{-k} U^k, formed explicitly. O(r* N^3).
Operator spectral_projector(const Operator& U, u64 rstar, double phase, int j);

/// Same spectrum with each eigenspace basis replaced by a Haar-random
/// rotation of itself.
Spectrum rotate_within_eigenspaces(const Spectrum& s, std::uint64_t seed);

/// <Op psi, psi>. Throws NotNormalized.
Complex expectation(const Operator& op, const StateVector& psi, const Tolerances& tol = {});

/// <Op psi_j, psi_j> for every basis vector of the spectrum, in eigenspace order.
std::vector<Complex> diagonal_elements(const Operator& op, const Spectrum& s);

double variance_stat(const std::vector<Complex>& diagonal, Complex mean);
double max_deviation(const std::vector<Complex>& diagonal, Complex mean);

struct FourthMoment {
  double S4 = 0.0;
  double bound = 0.0;
  double max_term = 0.0;
  u64 order = 0;
  u64 nu = 0;
};

FourthMoment fourth_moment(const Spectrum& s, const CatMap& A, Vec2 n);

/// Propagator, spectrum and ord(A, N) for one (A, N).
struct QuantumModel {
  CatMap A;
  u64 N = 0;
  u64 order = 0;
  Operator U;
  Spectrum eig;
};

QuantumModel build_model(const CatMap& A, u64 N, const SpectrumOptions& options = {});

double variance_stat(const CatMap& A, u64 N, const Observable& f, const SpectrumOptions& options = {});
double max_deviation(const CatMap& A, u64 N, const Observable& f, const SpectrumOptions& options = {});
/// Throws ZeroVector for n = 0 mod N.
FourthMoment fourth_moment(const CatMap& A, u64 N, Vec2 n, const SpectrumOptions& options = {});

}  // namespace catmap
