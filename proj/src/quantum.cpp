#include "catmap/quantum.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <random>

namespace catmap {

// --- observables -----------------------------------------------------------

Observable Observable::constant(Complex c) {
  Observable f;
  f.add({0, 0}, c);
  return f;
}

Observable Observable::mode(Vec2 n, Complex coefficient) {
  Observable f;
  f.add(n, coefficient);
  return f;
}

Observable Observable::cos1() {
  Observable f;
  f.add({1, 0}, 1.0);
  f.add({-1, 0}, 1.0);
  return f;
}

void Observable::add(Vec2 n, Complex coefficient) {
  Complex& slot = coeffs_[n];
  slot += coefficient;
  if (slot == Complex(0.0)) coeffs_.erase(n);
}

Complex Observable::mean() const {
  auto it = coeffs_.find({0, 0});
  return it == coeffs_.end() ? Complex(0.0) : it->second;
}

bool Observable::real_valued(double tol) const {
  for (const auto& [n, c] : coeffs_) {
    auto it = coeffs_.find({-n[0], -n[1]});
    Complex partner = it == coeffs_.end() ? Complex(0.0) : it->second;
    if (std::abs(partner - std::conj(c)) > tol) return false;
  }
  return true;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

[[noreturn]] void bad_observable(std::string_view text) {
  throw Error(Errc::InvalidArgument, "cannot parse observable '" + std::string(text) +
                                         "'; expected cos1 or c:(n1,n2)=re,im;...");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view s, std::string_view whole) {
  s = trim(s);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) bad_observable(whole);
  return v;
}

}  // namespace

std::string Observable::to_string() const {
  std::string out = "c:";
  bool first = true;
  for (const auto& [n, c] : coeffs_) {
    if (!first) out += ";";
    first = false;
    out += "(" + std::to_string(n[0]) + "," + std::to_string(n[1]) + ")=" + format_double(c.real()) +
           "," + format_double(c.imag());
  }
  return out;
}

Observable Observable::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s == "cos1") return cos1();
  if (s.starts_with("c:")) s.remove_prefix(2);
  Observable f;
  while (!s.empty()) {
    std::size_t end = s.find(';');
    std::string_view term = trim(s.substr(0, end));
    s = end == std::string_view::npos ? std::string_view{} : s.substr(end + 1);
    if (term.empty()) continue;
    if (term.front() != '(') bad_observable(text);
    std::size_t close = term.find(')');
    std::size_t comma = term.find(',');
    if (close == std::string_view::npos || comma > close) bad_observable(text);
    Vec2 n{parse_number<i64>(term.substr(1, comma - 1), text),
           parse_number<i64>(term.substr(comma + 1, close - comma - 1), text)};
    std::string_view rest = trim(term.substr(close + 1));
    if (rest.empty() || rest.front() != '=') bad_observable(text);
    rest.remove_prefix(1);
    std::size_t sep = rest.find(',');
    double re = parse_number<double>(rest.substr(0, sep), text);
    double im = sep == std::string_view::npos ? 0.0 : parse_number<double>(rest.substr(sep + 1), text);
    f.add(n, Complex(re, im));
  }
  return f;
}

// --- basic operator helpers ------------------------------------------------

Vec2 act(const CatMap& A, Vec2 n) {
  return {n[0] * A.a + n[1] * A.c, n[0] * A.b + n[1] * A.d};
}

Complex inner(const StateVector& phi, const StateVector& psi) {
  return psi.dot(phi) / static_cast<double>(phi.size());
}

double max_abs(const Operator& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

double unitarity_defect(const Operator& M) {
  return max_abs(M.adjoint() * M - Operator::Identity(M.rows(), M.cols()));
}

double hermiticity_defect(const Operator& M) {
  return max_abs(M - M.adjoint());
}

namespace {

std::vector<Complex> half_unit_roots(u64 N) {
  std::vector<Complex> table(2 * N);
  for (u64 k = 0; k < 2 * N; ++k) {
    table[k] = std::polar(1.0, std::numbers::pi * static_cast<double>(k) / static_cast<double>(N));
  }
  return table;
}

// T_N(n) M without forming T_N(n).
Operator translate_rows(u64 N, Vec2 n, const Operator& M) {
  const i64 m = static_cast<i64>(N);
  const i64 shift = detail::mod_i64(n[0], m);
  const i64 n1 = detail::mod_i64(n[0], 2 * m);
  const i64 n2 = detail::mod_i64(n[1], 2 * m);
  Operator out(M.rows(), M.cols());
  i64 k = (n1 * n2) % (2 * m);
  const i64 step = (2 * n2) % (2 * m);
  for (i64 q = 0; q < m; ++q) {
    Complex phase = std::polar(1.0, std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
    out.row(q) = phase * M.row((q + shift) % m);
    k = (k + step) % (2 * m);
  }
  return out;
}

// Solutions of T(n) U = U T(nA) for the two generators. Both sides are
// monomial, so each scalar equation ties two entries of U by a root of unity
// of order 2N. Entries are nodes, equations are edges; every component on
// which the phases close up contributes one free parameter.
struct IntertwinerGraph {
  u64 N;
  std::vector<int> component;   // per node, -1 before visiting
  std::vector<i64> potential;   // exponent of exp(i pi k / N) relative to the root
  std::vector<bool> consistent; // per component
};

IntertwinerGraph solve_intertwiner(const CatMap& A, u64 N) {
  const i64 m = static_cast<i64>(N);
  const i64 two_m = 2 * m;
  struct Gen {
    i64 n_shift, m_shift;
    i64 n1, n2, m1, m2;  // reduced mod 2N
  };
  std::vector<Gen> gens;
  for (Vec2 n : {Vec2{1, 0}, Vec2{0, 1}}) {
    Vec2 img = act(A, n);
    gens.push_back({detail::mod_i64(n[0], m), detail::mod_i64(img[0], m), detail::mod_i64(n[0], two_m),
                    detail::mod_i64(n[1], two_m), detail::mod_i64(img[0], two_m),
                    detail::mod_i64(img[1], two_m)});
  }
  auto k_of = [two_m](i64 v1, i64 v2, i64 q) { return (v1 * v2 + 2 * v2 * q) % two_m; };

  IntertwinerGraph g{N, std::vector<int>(N * N, -1), std::vector<i64>(N * N, 0), {}};
  std::deque<i64> queue;
  for (i64 root = 0; root < m * m; ++root) {
    if (g.component[root] >= 0) continue;
    const int id = static_cast<int>(g.consistent.size());
    g.consistent.push_back(true);
    g.component[root] = id;
    queue.push_back(root);
    while (!queue.empty()) {
      const i64 node = queue.front();
      queue.pop_front();
      const i64 r = node / m, c = node % m;
      auto visit = [&](i64 target, i64 delta) {
        const i64 want = detail::mod_i64(g.potential[node] + delta, two_m);
        if (g.component[target] < 0) {
          g.component[target] = id;
          g.potential[target] = want;
          queue.push_back(target);
        } else if (g.potential[target] != want) {
          g.consistent[id] = false;
        }
      };
      for (const Gen& gen : gens) {
        // U[Q + n1, Q'] = exp(i pi (k_m(Q' - m1) - k_n(Q)) / N) U[Q, Q' - m1]
        // forward from (Q, Q' - m1) = (r, c)
        {
          const i64 delta = k_of(gen.m1, gen.m2, c) - k_of(gen.n1, gen.n2, r);
          visit(((r + gen.n_shift) % m) * m + (c + gen.m_shift) % m, delta);
        }
        // backward from (Q + n1, Q') = (r, c)
        {
          const i64 q = detail::mod_i64(r - gen.n_shift, m);
          const i64 qp = detail::mod_i64(c - gen.m_shift, m);
          const i64 delta = k_of(gen.m1, gen.m2, qp) - k_of(gen.n1, gen.n2, q);
          visit(q * m + qp, -delta);
        }
      }
    }
  }
  return g;
}

Operator intertwiner_propagator(const CatMap& A, u64 N) {
  IntertwinerGraph g = solve_intertwiner(A, N);
  std::vector<int> good;
  for (std::size_t id = 0; id < g.consistent.size(); ++id)
    if (g.consistent[id]) good.push_back(static_cast<int>(id));
  if (good.size() != 1) {
    throw Error(Errc::ConstructionFailed, "intertwiner solution space has dimension " +
                                              std::to_string(good.size()) + " for N = " + std::to_string(N));
  }
  const auto roots = half_unit_roots(N);
  const Eigen::Index m = static_cast<Eigen::Index>(N);
  Operator U = Operator::Zero(m, m);
  u64 support = 0;
  for (Eigen::Index node = 0; node < m * m; ++node) {
    if (g.component[node] != good[0]) continue;
    U(node / m, node % m) = roots[g.potential[node]];
    ++support;
  }
  U *= std::sqrt(static_cast<double>(N) / static_cast<double>(support));
  return U;
}

Operator gauss_propagator(const CatMap& A, u64 N) {
  const i64 m = static_cast<i64>(N);
  const u64 inv = inverse_mod(static_cast<u64>(detail::mod_i64(2 * A.c, m)), N);
  const i64 a = detail::mod_i64(A.a, m), d = detail::mod_i64(A.d, m);
  std::vector<Complex> roots(N);
  for (u64 k = 0; k < N; ++k) {
    roots[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(N));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  Operator U(m, m);
  for (i64 q = 0; q < m; ++q) {
    for (i64 qp = 0; qp < m; ++qp) {
      i128 quad = static_cast<i128>(d) * qp % m * qp - 2 * static_cast<i128>(q) * qp +
                  static_cast<i128>(a) * q % m * q;
      i128 e = quad % m;
      if (e < 0) e += m;
      e = e * static_cast<i128>(inv) % m;
      U(q, qp) = scale * roots[static_cast<std::size_t>(e)];
    }
  }
  return U;
}

}  // namespace

bool fast_path_applies(const CatMap& A, u64 N) {
  return N % 2 == 1 && gcd<u64>(static_cast<u64>(detail::mod_i64(A.c, static_cast<i64>(N))), N) == 1;
}

std::size_t intertwiner_solution_dimension(const CatMap& A, u64 N) {
  if (N == 0) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  IntertwinerGraph g = solve_intertwiner(A, N);
  return static_cast<std::size_t>(std::count(g.consistent.begin(), g.consistent.end(), true));
}

void normalize_phase(Operator& U) {
  if (U.size() == 0) return;
  const double top = U.col(0).cwiseAbs().maxCoeff();
  if (top == 0.0) return;
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    if (std::abs(U(i, 0)) >= top * (1.0 - 1e-9)) {
      Complex z = U(i, 0);
      U *= std::conj(z) / std::abs(z);
      U(i, 0) = Complex(std::abs(z), 0.0);
      return;
    }
  }
}

Operator propagator(const CatMap& A, u64 N, PropagatorPath path, const Tolerances& tol) {
  if (N == 0) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  if (path == PropagatorPath::Auto) {
    path = fast_path_applies(A, N) ? PropagatorPath::Fast : PropagatorPath::Intertwiner;
  }
  Operator U;
  if (path == PropagatorPath::Fast) {
    if (!fast_path_applies(A, N)) {
      throw Error(Errc::InvalidArgument, "Gauss-sum kernel needs odd N coprime to c; N = " + std::to_string(N));
    }
    U = gauss_propagator(A, N);
  } else {
    U = intertwiner_propagator(A, N);
  }
  normalize_phase(U);
  const double defect = unitarity_defect(U);
  if (!(defect <= tol.construction)) {
    throw Error(Errc::NotUnitary, "propagator unitarity defect " + format_double(defect));
  }
  return U;
}

double egorov_residual(const Operator& U, const CatMap& A, int n_max) {
  const u64 N = static_cast<u64>(U.rows());
  const Operator Uadj = U.adjoint();
  double worst = 0.0;
  for (i64 n1 = -n_max; n1 <= n_max; ++n1) {
    for (i64 n2 = -n_max; n2 <= n_max; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      Operator lhs = Uadj * translate_rows(N, {n1, n2}, U);
      worst = std::max(worst, max_abs(lhs - translation(N, act(A, {n1, n2}))));
    }
  }
  return worst;
}

// --- spectrum --------------------------------------------------------------

int Spectrum::total_multiplicity() const {
  int total = 0;
  for (const auto& e : spaces) total += e.multiplicity;
  return total;
}

Operator Spectrum::eigenbasis() const {
  const Eigen::Index m = static_cast<Eigen::Index>(N);
  Operator out(m, m);
  Eigen::Index col = 0;
  for (const auto& e : spaces) {
    out.middleCols(col, e.multiplicity) = e.basis;
    col += e.multiplicity;
  }
  return out;
}

namespace {

Complex eigenvalue(u64 rstar, double phase, int j) {
  return std::polar(1.0, (phase + 2.0 * std::numbers::pi * j) / static_cast<double>(rstar));
}

// lambda_j^{-k} with the integer part of the angle reduced first.
Complex inverse_power(u64 rstar, double phase, int j, u64 k) {
  const double r = static_cast<double>(rstar);
  const double turns = static_cast<double>((k * static_cast<u64>(j)) % rstar);
  return std::polar(1.0, -(static_cast<double>(k) * phase + 2.0 * std::numbers::pi * turns) / r);
}

Operator random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Operator M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = Complex(normal(rng), normal(rng));
  return M;
}

}  // namespace

Spectrum spectrum(const Operator& U, u64 r_hint, const SpectrumOptions& options) {
  if (r_hint == 0) throw Error(Errc::InvalidArgument, "r_hint must be >= 1");
  const Eigen::Index m = U.rows();
  const u64 N = static_cast<u64>(m);
  const double dN = static_cast<double>(N);
  const u64 K = 2 * r_hint;

  // Baby steps U^0..U^{s-1}, giant step G = U^s; tr(G^q B_t) = sum G^q .* B_t^T.
  const u64 s = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(K + 1))));
  std::vector<Operator> baby;
  baby.reserve(s);
  baby.push_back(Operator::Identity(m, m));
  for (u64 t = 1; t < s; ++t) baby.push_back(baby.back() * U);
  const Operator G = baby.back() * U;

  std::vector<Complex> traces;
  traces.reserve(K + 1);
  u64 rstar = 0;
  double phase = 0.0;
  Operator giant = Operator::Identity(m, m);
  for (u64 q = 0; rstar == 0 && q * s <= K; ++q) {
    for (u64 t = 0; t < s && q * s + t <= K; ++t) {
      const u64 k = q * s + t;
      const Complex tr = (giant.cwiseProduct(baby[t].transpose())).sum();
      traces.push_back(tr);
      if (k == 0 || std::abs(tr) < dN * (1.0 - 1e-9)) continue;
      const double phi = std::arg(tr / dN);
      const Operator power = giant * baby[t];
      if (max_abs(power - std::polar(1.0, phi) * Operator::Identity(m, m)) <= options.tol.spectral) {
        rstar = k;
        phase = phi;
        break;
      }
    }
    giant = giant * G;
  }
  if (rstar == 0) {
    throw Error(Errc::NoScalarPower, "no power U^k, 1 <= k <= " + std::to_string(K) + ", is scalar");
  }

  Spectrum out;
  out.N = N;
  out.rstar = rstar;
  out.phase = phase;

  std::vector<int> mult(rstar, 0);
  int total = 0;
  for (u64 j = 0; j < rstar; ++j) {
    Complex acc = 0.0;
    for (u64 k = 0; k < rstar; ++k) acc += inverse_power(rstar, phase, static_cast<int>(j), k) * traces[k];
    const double value = acc.real() / static_cast<double>(rstar);
    const double rounded = std::round(value);
    if (std::abs(value - rounded) > options.tol.multiplicity_guard ||
        std::abs(acc.imag()) / static_cast<double>(rstar) > options.tol.multiplicity_guard) {
      throw Error(Errc::NonIntegralMultiplicity,
                  "trace of projector " + std::to_string(j) + " is " + format_double(value));
    }
    mult[j] = static_cast<int>(rounded);
    total += mult[j];
  }
  if (total != static_cast<int>(N)) {
    throw Error(Errc::NonIntegralMultiplicity, "multiplicities sum to " + std::to_string(total));
  }

  // Range of each projector from a random sketch: P_j Omega by Horner in G
  // over blocks of s baby-step products B_t Omega.
  const int max_mult = *std::max_element(mult.begin(), mult.end());
  const Eigen::Index width = std::min<Eigen::Index>(m, max_mult + options.oversample);
  std::mt19937_64 rng(options.seed);
  const Operator omega = random_gaussian(m, width, rng);
  std::vector<Operator> sketched;
  const u64 used_baby = std::min<u64>(s, rstar);
  for (u64 t = 0; t < used_baby; ++t) sketched.push_back(baby[t] * omega);
  const u64 blocks = (rstar + s - 1) / s;

  for (u64 j = 0; j < rstar; ++j) {
    if (mult[j] == 0) continue;
    const int jj = static_cast<int>(j);
    Operator Z;
    for (u64 q = blocks; q-- > 0;) {
      Operator Y = Operator::Zero(m, width);
      for (u64 t = 0; t < used_baby && q * s + t < rstar; ++t) {
        Y += inverse_power(rstar, phase, jj, q * s + t) * sketched[t];
      }
      Z = (q + 1 == blocks) ? Y : Operator(G * Z + Y);
    }
    Z /= static_cast<double>(rstar);

    Eigen::ColPivHouseholderQR<Operator> qr(Z);
    const Operator R = qr.matrixR().template triangularView<Eigen::Upper>();
    const double lead = std::abs(R(0, 0));
    const int mj = mult[j];
    if (lead == 0.0 || std::abs(R(mj - 1, mj - 1)) < lead * 1e-8) {
      throw Error(Errc::ConstructionFailed, "projector sketch lost rank for eigenphase " + std::to_string(j));
    }
    Operator Q = qr.householderQ() * Operator::Identity(m, mj);

    Eigenspace space;
    space.index = jj;
    space.eigenvalue = eigenvalue(rstar, phase, jj);
    space.multiplicity = mj;
    space.basis = Q * std::sqrt(dN);
    const Operator res = U * space.basis - space.eigenvalue * space.basis;
    for (Eigen::Index c = 0; c < mj; ++c) {
      out.max_residual = std::max(out.max_residual, res.col(c).norm() / std::sqrt(dN));
    }
    out.spaces.push_back(std::move(space));
  }
  const Operator basis = out.eigenbasis();
  out.orthonormality_defect = max_abs(basis.adjoint() * basis / dN - Operator::Identity(m, m));
  return out;
}

Operator spectral_projector(const Operator& U, u64 rstar, double phase, int j) {
  const Eigen::Index m = U.rows();
  Operator P = Operator::Zero(m, m);
  Operator power = Operator::Identity(m, m);
  for (u64 k = 0; k < rstar; ++k) {
    P += inverse_power(rstar, phase, j, k) * power;
    power = power * U;
  }
  return P / static_cast<double>(rstar);
}

Spectrum rotate_within_eigenspaces(const Spectrum& s, std::uint64_t seed) {
  Spectrum out = s;
  std::mt19937_64 rng(seed);
  for (auto& space : out.spaces) {
    const Eigen::Index k = space.multiplicity;
    Eigen::HouseholderQR<Operator> qr(random_gaussian(k, k, rng));
    Operator Q = qr.householderQ() * Operator::Identity(k, k);
    space.basis = space.basis * Q;
  }
  return out;
}

// --- statistics ------------------------------------------------------------

Complex expectation(const Operator& op, const StateVector& psi, const Tolerances& tol) {
  const double norm = inner(psi, psi).real();
  if (!(std::abs(norm - 1.0) <= tol.normalization)) {
    throw Error(Errc::NotNormalized, "<psi, psi> = " + format_double(norm));
  }
  return inner(op * psi, psi);
}

std::vector<Complex> diagonal_elements(const Operator& op, const Spectrum& s) {
  const Operator basis = s.eigenbasis();
  const Operator image = op * basis;
  std::vector<Complex> out(static_cast<std::size_t>(basis.cols()));
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    out[static_cast<std::size_t>(j)] = basis.col(j).dot(image.col(j)) / static_cast<double>(s.N);
  }
  return out;
}

double variance_stat(const std::vector<Complex>& diagonal, Complex mean) {
  if (diagonal.empty()) return 0.0;
  double sum = 0.0;
  for (Complex z : diagonal) sum += std::norm(z - mean);
  return sum / static_cast<double>(diagonal.size());
}

double max_deviation(const std::vector<Complex>& diagonal, Complex mean) {
  double worst = 0.0;
  for (Complex z : diagonal) worst = std::max(worst, std::abs(z - mean));
  return worst;
}

FourthMoment fourth_moment(const Spectrum& s, const CatMap& A, Vec2 n) {
  const i64 m = static_cast<i64>(s.N);
  if (detail::mod_i64(n[0], m) == 0 && detail::mod_i64(n[1], m) == 0) {
    throw Error(Errc::ZeroVector, "n = 0 mod " + std::to_string(s.N));
  }
  FourthMoment out;
  for (Complex z : diagonal_elements(translation(s.N, n), s)) {
    const double term = std::norm(z) * std::norm(z);
    out.S4 += term;
    out.max_term = std::max(out.max_term, term);
  }
  NuCount nu = count_nu(A, s.N, n);
  out.order = nu.r;
  out.nu = nu.nu;
  const double r = static_cast<double>(nu.r);
  out.bound = static_cast<double>(s.N) / (r * r * r * r) * static_cast<double>(nu.nu);
  return out;
}

QuantumModel build_model(const CatMap& A, u64 N, const SpectrumOptions& options) {
  QuantumModel model;
  model.A = A;
  model.N = N;
  model.order = ord(A, N);
  model.U = propagator(A, N, PropagatorPath::Auto, options.tol);
  model.eig = spectrum(model.U, model.order, options);
  return model;
}

double variance_stat(const CatMap& A, u64 N, const Observable& f, const SpectrumOptions& options) {
  QuantumModel model = build_model(A, N, options);
  return variance_stat(diagonal_elements(weyl_quantize(N, f), model.eig), f.mean());
}

double max_deviation(const CatMap& A, u64 N, const Observable& f, const SpectrumOptions& options) {
  QuantumModel model = build_model(A, N, options);
  return max_deviation(diagonal_elements(weyl_quantize(N, f), model.eig), f.mean());
}

FourthMoment fourth_moment(const CatMap& A, u64 N, Vec2 n, const SpectrumOptions& options) {
  const i64 m = static_cast<i64>(N);
  if (N == 0) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  if (detail::mod_i64(n[0], m) == 0 && detail::mod_i64(n[1], m) == 0) {
    throw Error(Errc::ZeroVector, "n = 0 mod " + std::to_string(N));
  }
  return fourth_moment(build_model(A, N, options).eig, A, n);
}

}  // namespace catmap
