#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <random>

#include "catmap/quad_order.hpp"
#include "catmap/quantum.hpp"
#include "support.hpp"

using namespace catmap;
using test::cat;
using test::error_of;

namespace {

double dist(const Operator& X, const Operator& Y) { return (X - Y).cwiseAbs().maxCoeff(); }

// |<X, Y>_F| / (|X| |Y|); 1 exactly when X and Y are proportional.
double alignment(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  return std::abs(x.dot(y)) / (x.norm() * y.norm());
}

Eigen::VectorXcd vec(const Operator& U) { return Eigen::Map<const Eigen::VectorXcd>(U.data(), U.size()); }

}  // namespace

TEST_CASE("translation operators") {
  CHECK(dist(translation(7, {0, 0}), Operator::Identity(7, 7)) == 0.0);
  for (int N : {1, 2, 5, 6, 9})
    for (i64 a = -3; a <= 3; ++a)
      for (i64 b = -3; b <= 3; ++b) {
        const Operator T = translation(u64(N), {a, b});
        CHECK(dist(T, oracle::translation(N, a, b)) <= 1e-12);
        CHECK(unitarity_defect(T) <= 1e-12);
        CHECK(dist(T.adjoint(), translation(u64(N), {-a, -b})) <= 1e-12);
      }
}

TEST_CASE("trace_translation") {
  CHECK(std::abs(trace_translation(5, {0, 0}) - Complex(5)) <= 1e-12);
  CHECK(std::abs(trace_translation(5, {5, 10})) == doctest::Approx(5.0));
  CHECK(std::abs(trace_translation(5, {1, 3})) <= 1e-8);
  for (i64 a = -10; a <= 10; ++a)
    for (i64 b = -10; b <= 10; ++b) CHECK(std::abs(trace_translation(5, {a, b}) - translation(5, {a, b}).trace()) <= 1e-10);
}

TEST_CASE("weyl_quantize") {
  const Operator single = weyl_quantize(7, Observable::mode({2, -1}));
  CHECK(dist(single, translation(7, {2, -1})) == 0.0);
  CHECK(dist(weyl_quantize(6, Observable::constant(2.5)), 2.5 * Operator::Identity(6, 6)) <= 1e-15);
  const Operator c = weyl_quantize(9, Observable::cos1());
  CHECK(dist(c, translation(9, {1, 0}) + translation(9, {-1, 0})) <= 1e-14);
  CHECK(hermiticity_defect(c) <= 1e-14);
}

TEST_CASE("Observable parse and print") {
  CHECK(Observable::parse("cos1") == Observable::cos1());
  const Observable f = Observable::parse("c:(1,0)=0.5,0;(-1,0)=0.5,0;(0,0)=2,0");
  CHECK(f.mean() == Complex(2));
  CHECK(f.real_valued());
  CHECK(Observable::parse(f.to_string()) == f);
  CHECK(error_of([] { Observable::parse("(1,0"); }) == Errc::InvalidArgument);
}

TEST_CASE("propagator agrees with the dense intertwiner kernel") {
  const CatMap& A = cat();
  for (int N = 2; N <= 10; ++N) {
    const Eigen::MatrixXcd K = oracle::intertwiner_kernel(test::m2(A), N);
    REQUIRE(K.cols() == 1);
    CHECK(intertwiner_solution_dimension(A, u64(N)) == 1);
    const Operator U = propagator(A, u64(N));
    CHECK(alignment(vec(U), K.col(0)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(unitarity_defect(U) <= 1e-10);
    CHECK(egorov_residual(U, A, 3) <= 1e-9);
  }
  const CatMap B = validate_map(3, 2, 4, 3);
  for (int N : {3, 5, 8}) {
    const Eigen::MatrixXcd K = oracle::intertwiner_kernel(test::m2(B), N);
    REQUIRE(K.cols() == 1);
    CHECK(alignment(vec(propagator(B, u64(N))), K.col(0)) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("fast path matches the intertwiner") {
  const CatMap& A = cat();
  for (u64 N : {5, 7, 11, 13, 25, 35}) {
    REQUIRE(fast_path_applies(A, N));
    const Operator F = propagator(A, N, PropagatorPath::Fast);
    const Operator I = propagator(A, N, PropagatorPath::Intertwiner);
    CHECK(dist(F, I) <= 1e-10);
  }
  CHECK_FALSE(fast_path_applies(A, 9));
  CHECK_FALSE(fast_path_applies(A, 8));
  CHECK(error_of([&] { propagator(A, 8, PropagatorPath::Fast); }) == Errc::InvalidArgument);
}

TEST_CASE("phase normalization") {
  const Operator U = propagator(cat(), 7);
  Eigen::Index row = 0;
  const double top = U.col(0).cwiseAbs().maxCoeff();
  while (std::abs(U(row, 0)) < top * (1 - 1e-9)) ++row;
  CHECK(std::abs(U(row, 0).imag()) <= 1e-14);
  CHECK(U(row, 0).real() > 0);
  Operator V = U * std::polar(1.0, 1.234);
  normalize_phase(V);
  CHECK(dist(U, V) <= 1e-12);
}

TEST_CASE("egorov_residual detects corruption") {
  const CatMap& A = cat();
  Operator U = propagator(A, 11);
  CHECK(egorov_residual(U, A, 0) == 0.0);
  CHECK(egorov_residual(U, A, 3) <= 1e-9);
  U(2, 3) += 0.01;
  CHECK(egorov_residual(U, A, 3) > 1e-3);
}

TEST_CASE("spectrum of the identity") {
  const Spectrum s = spectrum(Operator::Identity(6, 6), 1);
  CHECK(s.rstar == 1);
  REQUIRE(s.spaces.size() == 1);
  CHECK(std::abs(s.spaces[0].eigenvalue - Complex(1)) <= 1e-12);
  CHECK(s.spaces[0].multiplicity == 6);
}

TEST_CASE("spectrum against a dense eigensolver") {
  const CatMap& A = cat();
  for (u64 N : {2, 3, 4, 5, 7, 8, 12, 13, 25}) {
    const QuantumModel m = build_model(A, N);
    CHECK(m.eig.total_multiplicity() == int(N));
    CHECK(m.eig.max_residual <= 1e-8);
    CHECK(m.eig.orthonormality_defect <= 1e-10);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.U);
    std::vector<Complex> dense(es.eigenvalues().data(), es.eigenvalues().data() + N);
    std::vector<Complex> ours;
    for (const auto& e : m.eig.spaces)
      for (int k = 0; k < e.multiplicity; ++k) ours.push_back(e.eigenvalue);
    auto by_angle = [](Complex a, Complex b) { return std::arg(a) < std::arg(b); };
    std::sort(dense.begin(), dense.end(), by_angle);
    std::sort(ours.begin(), ours.end(), by_angle);
    // Eigenvalues near -1 can straddle the branch cut, so match greedily.
    for (Complex z : ours) {
      auto it = std::min_element(dense.begin(), dense.end(),
                                 [&](Complex a, Complex b) { return std::abs(a - z) < std::abs(b - z); });
      CHECK(std::abs(*it - z) <= 1e-6);
      dense.erase(it);
    }
  }
}

TEST_CASE("projectors") {
  const QuantumModel m = build_model(cat(), 7);
  Operator sum = Operator::Zero(7, 7);
  for (const auto& e : m.eig.spaces) {
    const Operator P = spectral_projector(m.U, m.eig.rstar, m.eig.phase, e.index);
    CHECK(dist(P * P, P) <= 1e-10);
    CHECK(std::abs(P.trace() - Complex(e.multiplicity)) <= 1e-8);
    // Basis columns are orthonormal for (1/N) sum, so P = B B* / N.
    CHECK(dist(P, e.basis * e.basis.adjoint() / 7.0) <= 1e-9);
    sum += P;
  }
  CHECK(dist(sum, Operator::Identity(7, 7)) <= 1e-10);
}

TEST_CASE("expectation") {
  const QuantumModel m = build_model(cat(), 11);
  const StateVector psi = m.eig.spaces[0].basis.col(0);
  CHECK(std::abs(expectation(Operator::Identity(11, 11), psi) - Complex(1)) <= 1e-10);
  CHECK(std::abs(expectation(weyl_quantize(11, Observable::constant(3.0)), psi) - Complex(3)) <= 1e-10);
  for (i64 a = -2; a <= 2; ++a)
    for (i64 b = -2; b <= 2; ++b) CHECK(std::abs(expectation(translation(11, {a, b}), psi)) <= 1 + 1e-10);
  CHECK(error_of([&] { expectation(Operator::Identity(11, 11), StateVector(2 * psi)); }) == Errc::NotNormalized);
}

TEST_CASE("eigenspace sums of diagonal elements are basis independent") {
  // Sum over an eigenspace basis of <Op psi, psi> is tr(P_j Op), which the
  // explicit projector gives without any eigenvector choice.
  const CatMap& A = cat();
  for (u64 N : {5, 7, 8, 13}) {
    const QuantumModel m = build_model(A, N);
    const Operator op = weyl_quantize(N, Observable::cos1());
    const auto diag = diagonal_elements(op, m.eig);
    std::size_t at = 0;
    for (const auto& e : m.eig.spaces) {
      Complex sum = 0;
      for (int k = 0; k < e.multiplicity; ++k) sum += diag[at++];
      const Operator P = spectral_projector(m.U, m.eig.rstar, m.eig.phase, e.index);
      CHECK(std::abs(sum - (P * op).trace()) <= 1e-8);
    }
    const Spectrum rotated = rotate_within_eigenspaces(m.eig, 99);
    const auto rdiag = diagonal_elements(op, rotated);
    Complex total = 0, rtotal = 0;
    for (auto z : diag) total += z;
    for (auto z : rdiag) rtotal += z;
    CHECK(std::abs(total - rtotal) <= 1e-9);
  }
}

TEST_CASE("variance and max deviation") {
  const CatMap& A = cat();
  for (u64 N : {5, 7, 11}) {
    CHECK(variance_stat(A, N, Observable::constant(1.5)) <= 1e-24);
    CHECK(max_deviation(A, N, Observable::constant(1.5)) <= 1e-12);
  }
  // Regression fixtures for the default eigenbasis construction.
  const double v5 = variance_stat(A, 5, Observable::cos1());
  CHECK(v5 >= 0.0);
  CHECK(v5 <= 1.0);
  CHECK(v5 == doctest::Approx(0.32792797126499773).epsilon(1e-9));
  CHECK(max_deviation(A, 5, Observable::cos1()) == doctest::Approx(0.81805710142750132).epsilon(1e-9));
  CHECK(max_deviation(A, 13, Observable::cos1()) == doctest::Approx(1.1549260714185605).epsilon(1e-9));
}

TEST_CASE("fourth moment") {
  const CatMap& A = cat();
  CHECK(error_of([&] { fourth_moment(A, 5, {5, 0}); }) == Errc::ZeroVector);
  const FourthMoment f5 = fourth_moment(A, 5, {1, 0});
  CHECK(f5.order == 3);
  CHECK(f5.nu == 15);
  CHECK(f5.bound == doctest::Approx(5.0 * 15 / 81));
  CHECK(f5.S4 == doctest::Approx(0.10966051776278225).epsilon(1e-9));
  for (u64 p : {7, 11, 13, 17, 19}) {
    const FourthMoment f = fourth_moment(A, p, {1, 0});
    CHECK(f.nu == oracle::nu(test::m2(A), static_cast<i64>(p), {1, 0}));
    CHECK(f.S4 <= f.bound * (1 + 1e-6));
    CHECK(f.max_term <= f.S4 + 1e-15);
  }
}
