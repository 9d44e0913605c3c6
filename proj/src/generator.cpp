#include "gkls/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gkls/error.hpp"

namespace gkls {

namespace {

using namespace std::complex_literals;

ComplexMatrix identity(int d) { return ComplexMatrix::Identity(d, d); }

double rel_scale(const ComplexMatrix& m) { return std::max(1.0, m.norm()); }

void check_basis(const std::vector<ComplexMatrix>& basis, int d) {
  const auto n = static_cast<std::size_t>(d) * d - 1;
  if (basis.size() != n)
    throw Error(Errc::NonOrthonormalBasis, "expected " + std::to_string(n) + " basis elements, got " +
                                               std::to_string(basis.size()));
  for (std::size_t i = 0; i < n; ++i) {
    if (basis[i].rows() != d || basis[i].cols() != d)
      throw Error(Errc::DimensionMismatch, "basis element " + std::to_string(i) + " has the wrong shape");
    if (std::abs(basis[i].trace()) > 1e-10)
      throw Error(Errc::NonOrthonormalBasis, "basis element " + std::to_string(i) + " is not traceless");
    for (std::size_t j = 0; j <= i; ++j) {
      const Complex ip = hs_inner(basis[j], basis[i]);
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(ip - expect) > 1e-10)
        throw Error(Errc::NonOrthonormalBasis,
                    "Tr(F_" + std::to_string(j) + "^+ F_" + std::to_string(i) + ") = " + std::to_string(std::abs(ip)));
    }
  }
}

// Largest-magnitude entry made real positive.
void fix_phase(ComplexMatrix& m) {
  Eigen::Index bi = 0, bj = 0;
  double best = -1.0;
  // Row-major scan; near-ties resolve to the first entry in reading order.
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double a = std::abs(m(i, j));
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        bi = i;
        bj = j;
      }
    }
  if (best <= 0.0) return;
  const Complex z = m(bi, bj);
  m *= std::conj(z) / std::abs(z);
  m(bi, bj) = std::abs(z);
}

}  // namespace

double GklsGenerator::rate_at(std::size_t k, double t) const {
  const Rate& r = channels.at(k).rate;
  if (const auto* v = std::get_if<double>(&r)) return *v;
  try {
    return std::get<RateExpr>(r).eval(t);
  } catch (const Error& e) {
    throw Error(Errc::RateEvalError, "channel " + std::to_string(k) + " at t = " + std::to_string(t) + ": " + e.what());
  }
}

std::vector<double> GklsGenerator::rates_at(double t) const {
  std::vector<double> out(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) out[k] = rate_at(k, t);
  return out;
}

GklsGenerator build(const ComplexMatrix& hamiltonian, std::vector<Channel> channels, std::vector<std::string>* warnings,
                    std::string label) {
  if (hamiltonian.rows() != hamiltonian.cols())
    throw Error(Errc::DimensionMismatch, "hamiltonian is " + std::to_string(hamiltonian.rows()) + "x" +
                                             std::to_string(hamiltonian.cols()));
  const int d = static_cast<int>(hamiltonian.rows());
  if (d < 2) throw Error(Errc::DimensionMismatch, "dimension must be at least 2, got " + std::to_string(d));
  require_finite(hamiltonian, "hamiltonian");
  if ((hamiltonian - hamiltonian.adjoint()).norm() > kHermitianTol * rel_scale(hamiltonian))
    throw Error(Errc::NonHermitianHamiltonian,
                "||H - H^+||_F = " + std::to_string((hamiltonian - hamiltonian.adjoint()).norm()));

  GklsGenerator g;
  g.dim = d;
  g.hamiltonian = hermitian_part(hamiltonian);
  g.label = std::move(label);
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const auto& c = channels[k];
    if (c.op.rows() != d || c.op.cols() != d)
      throw Error(Errc::DimensionMismatch, "channel " + std::to_string(k) + " operator is " +
                                               std::to_string(c.op.rows()) + "x" + std::to_string(c.op.cols()) +
                                               ", expected " + std::to_string(d) + "x" + std::to_string(d));
    require_finite(c.op, "noise operator");
    if (const auto* v = std::get_if<double>(&c.rate)) {
      if (!std::isfinite(*v)) throw Error(Errc::InvalidArgument, "channel " + std::to_string(k) + " rate is not finite");
    } else {
      g.time_dependent = true;
    }
  }
  g.channels = std::move(channels);

  if (warnings) {
    for (std::size_t k = 0; k < g.channels.size(); ++k) {
      const auto& l = g.channels[k].op;
      if (std::abs(l.trace()) > 1e-10) warnings->push_back("channel " + std::to_string(k) + " is not traceless");
      for (std::size_t j = 0; j <= k; ++j) {
        const Complex ip = hs_inner(g.channels[j].op, l);
        if (std::abs(ip - (j == k ? 1.0 : 0.0)) > 1e-10) {
          warnings->push_back("channels " + std::to_string(j) + " and " + std::to_string(k) + " are not orthonormal");
        }
      }
    }
  }
  return g;
}

ComplexMatrix apply(const GklsGenerator& g, const ComplexMatrix& rho, double t) {
  if (rho.rows() != g.dim || rho.cols() != g.dim) throw Error(Errc::DimensionMismatch, "state has the wrong shape");
  ComplexMatrix out = -1.0i * commutator(g.hamiltonian, rho);
  for (std::size_t k = 0; k < g.channels.size(); ++k) {
    const double gamma = g.rate_at(k, t);
    if (gamma == 0.0) continue;
    const auto& l = g.channels[k].op;
    const ComplexMatrix ldl = l.adjoint() * l;
    out += gamma * (l * rho * l.adjoint() - 0.5 * anticommutator(ldl, rho));
  }
  return out;
}

ComplexMatrix adjoint_apply(const GklsGenerator& g, const ComplexMatrix& x, double t) {
  if (x.rows() != g.dim || x.cols() != g.dim) throw Error(Errc::DimensionMismatch, "observable has the wrong shape");
  ComplexMatrix out = 1.0i * commutator(g.hamiltonian, x);
  for (std::size_t k = 0; k < g.channels.size(); ++k) {
    const double gamma = g.rate_at(k, t);
    if (gamma == 0.0) continue;
    const auto& l = g.channels[k].op;
    const ComplexMatrix ldl = l.adjoint() * l;
    out += gamma * (l.adjoint() * x * l - 0.5 * anticommutator(ldl, x));
  }
  return out;
}

Superoperator reshape(const GklsGenerator& g, double t) {
  const int d = g.dim;
  const ComplexMatrix id = identity(d);
  Superoperator s;
  s.dim = d;
  s.matrix = -1.0i * kron(g.hamiltonian, id) + 1.0i * kron(id, g.hamiltonian.transpose());
  for (std::size_t k = 0; k < g.channels.size(); ++k) {
    const double gamma = g.rate_at(k, t);
    if (gamma == 0.0) continue;
    const auto& l = g.channels[k].op;
    const ComplexMatrix ldl = l.adjoint() * l;
    s.matrix += gamma * (kron(l, l.conjugate()) - 0.5 * (kron(ldl, id) + kron(id, ldl.transpose())));
  }
  return s;
}

std::vector<ComplexMatrix> gell_mann_basis(int d) {
  if (d < 1) throw Error(Errc::DimensionMismatch, "dimension must be positive");
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(d) * d - 1);
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      m(j, k) = s;
      m(k, j) = s;
      out.push_back(m);
    }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      m(j, k) = -1.0i * s;
      m(k, j) = 1.0i * s;
      out.push_back(m);
    }
  for (int l = 1; l < d; ++l) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    const double f = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) m(j, j) = f;
    m(l, l) = -l * f;
    out.push_back(m);
  }
  return out;
}

GksDecomposition gks_decompose(const Superoperator& s, const std::vector<ComplexMatrix>* basis) {
  const int d = s.dim;
  const auto n = static_cast<Eigen::Index>(d) * d;
  if (s.matrix.rows() != n || s.matrix.cols() != n)
    throw Error(Errc::DimensionMismatch, "superoperator is not d^2 x d^2");
  require_finite(s.matrix, "superoperator");

  GksDecomposition out;
  if (basis) {
    check_basis(*basis, d);
    out.basis = *basis;
  } else {
    out.basis = gell_mann_basis(d);
  }

  const double scale = std::max(1.0, s.matrix.norm());
  ComplexVector tr = vec(identity(d));
  const double tp_residual = (tr.adjoint() * s.matrix).norm();
  if (tp_residual > 1e-8 * scale)
    throw Error(Errc::NotTracePreserving, "||vec(I)^+ S|| = " + std::to_string(tp_residual));

  std::vector<ComplexMatrix> full;
  full.reserve(static_cast<std::size_t>(n));
  full.push_back(identity(d) / std::sqrt(static_cast<double>(d)));
  full.insert(full.end(), out.basis.begin(), out.basis.end());

  ComplexMatrix c(n, n);
  std::vector<ComplexMatrix> conj_full(full.size());
  for (std::size_t j = 0; j < full.size(); ++j) conj_full[j] = full[j].conjugate();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = hs_inner(kron(full[i], conj_full[j]), s.matrix);

  const double herm_residual = (c - c.adjoint()).norm();
  if (herm_residual > 1e-8 * std::max(1.0, c.norm()))
    throw Error(Errc::NotHermiticityPreserving, "coefficient matrix anti-Hermitian part = " + std::to_string(herm_residual));

  ComplexMatrix f = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 1; i < n; ++i) f += c(i, 0) * full[i];
  f /= std::sqrt(static_cast<double>(d));
  out.hamiltonian = hermitian_part((f.adjoint() - f) / (2.0i));
  out.kossakowski = hermitian_part(c.bottomRightCorner(n - 1, n - 1));
  return out;
}

Superoperator assemble_superoperator(const ComplexMatrix& hamiltonian, const ComplexMatrix& kossakowski,
                                     const std::vector<ComplexMatrix>& basis) {
  const auto d = static_cast<int>(hamiltonian.rows());
  const auto m = static_cast<Eigen::Index>(basis.size());
  if (kossakowski.rows() != m || kossakowski.cols() != m)
    throw Error(Errc::DimensionMismatch, "Kossakowski matrix does not match the basis size");
  const ComplexMatrix id = identity(d);
  Superoperator s;
  s.dim = d;
  s.matrix = -1.0i * kron(hamiltonian, id) + 1.0i * kron(id, hamiltonian.transpose());
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const Complex cij = kossakowski(i, j);
      if (cij == 0.0) continue;
      const ComplexMatrix fjfi = basis[j].adjoint() * basis[i];
      s.matrix += cij * (kron(basis[i], basis[j].conjugate()) - 0.5 * (kron(fjfi, id) + kron(id, fjfi.transpose())));
    }
  return s;
}

CanonicalForm canonicalize(const ComplexMatrix& hamiltonian, const ComplexMatrix& kossakowski,
                           const std::vector<ComplexMatrix>& basis) {
  const auto m = static_cast<Eigen::Index>(basis.size());
  if (kossakowski.rows() != m || kossakowski.cols() != m)
    throw Error(Errc::DimensionMismatch, "Kossakowski matrix does not match the basis size");
  const double herm_residual = (kossakowski - kossakowski.adjoint()).norm();
  if (herm_residual > 1e-10 * std::max(1.0, kossakowski.norm()))
    throw Error(Errc::NonHermitianKossakowski, "||C - C^+||_F = " + std::to_string(herm_residual));

  const int d = static_cast<int>(hamiltonian.rows());
  struct Mode {
    double gamma;
    ComplexMatrix op;
  };
  std::vector<Mode> modes;
  if (m > 0) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(kossakowski));
    if (es.info() != Eigen::Success) throw Error(Errc::IterationLimitExceeded, "Kossakowski eigensolve failed");
    for (Eigen::Index l = 0; l < m; ++l) {
      const double gamma = es.eigenvalues()(l);
      if (std::abs(gamma) < kPruneTol) continue;
      ComplexMatrix op = ComplexMatrix::Zero(d, d);
      for (Eigen::Index k = 0; k < m; ++k) op += es.eigenvectors()(k, l) * basis[k];
      fix_phase(op);
      modes.push_back({gamma, std::move(op)});
    }
  }
  std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.gamma > b.gamma; });

  std::vector<Channel> channels;
  CanonicalForm out;
  for (auto& mode : modes) {
    out.gamma_sum += mode.gamma;
    if (mode.gamma < -kPruneTol) out.completely_positive = false;
    channels.push_back({mode.gamma, std::move(mode.op)});
  }
  out.base = build(hamiltonian, std::move(channels));
  return out;
}

GklsGenerator frozen(const GklsGenerator& g, double t) {
  GklsGenerator out = g;
  out.time_dependent = false;
  for (std::size_t k = 0; k < out.channels.size(); ++k) out.channels[k].rate = g.rate_at(k, t);
  return out;
}

CanonicalForm canonical_form(const GklsGenerator& g, double t) {
  const auto dec = gks_decompose(reshape(g, t));
  CanonicalForm cf = canonicalize(dec.hamiltonian, dec.kossakowski, dec.basis);
  cf.base.label = g.label;
  return cf;
}

GklsGenerator extend(const GklsGenerator& g, int d_ext) {
  if (g.time_dependent) throw Error(Errc::TimeDependentNotSupported, "extend requires a time-autonomous generator");
  if (d_ext < 1) throw Error(Errc::InvalidArgument, "extension dimension must be positive");
  const int big = g.dim + d_ext;
  auto pad = [&](const ComplexMatrix& m) {
    ComplexMatrix out = ComplexMatrix::Zero(big, big);
    out.topLeftCorner(g.dim, g.dim) = m;
    return out;
  };
  std::vector<Channel> channels;
  for (const auto& c : g.channels) channels.push_back({c.rate, pad(c.op)});
  return build(pad(g.hamiltonian), std::move(channels), nullptr, g.label.empty() ? std::string{} : g.label + "+ext");
}

ComplexMatrix effective_hamiltonian_k(const GklsGenerator& g, double t) {
  ComplexMatrix k = -1.0i * g.hamiltonian;
  for (std::size_t c = 0; c < g.channels.size(); ++c) {
    const auto& l = g.channels[c].op;
    k -= 0.5 * g.rate_at(c, t) * (l.adjoint() * l);
  }
  return k;
}

GklsGenerator random_cp(int d, int n_channels, std::uint64_t seed) {
  if (d < 2) throw Error(Errc::DimensionMismatch, "dimension must be at least 2");
  const int m = d * d - 1;
  if (n_channels < 1 || n_channels > m)
    throw Error(Errc::BadChannelCount, std::to_string(n_channels) + " not in [1, " + std::to_string(m) + "]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) {
        const double re = normal(rng);
        const double im = normal(rng);
        a(i, j) = Complex(re, im);
      }
    return a;
  };
  const ComplexMatrix a = gaussian(d, d);
  const ComplexMatrix h = hermitian_part(a);
  const ComplexMatrix b = gaussian(m, n_channels);
  ComplexMatrix c = b * b.adjoint();
  c /= c.trace().real();
  CanonicalForm cf = canonicalize(h, hermitian_part(c), gell_mann_basis(d));
  cf.base.label = "random_cp(d=" + std::to_string(d) + ",n=" + std::to_string(n_channels) + ",seed=" +
                  std::to_string(seed) + ")";
  return cf.base;
}

ComplexMatrix random_state(int d, std::uint64_t seed) {
  if (d < 1) throw Error(Errc::DimensionMismatch, "dimension must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  ComplexMatrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

namespace pauli_ops {
ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }
ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, -1.0i, 1.0i, 0;
  return m;
}
ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
ComplexMatrix plus() {
  ComplexMatrix m(2, 2);
  m << 0, 0, 1, 0;
  return m;
}
ComplexMatrix minus() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  return m;
}
}  // namespace pauli_ops

GklsGenerator qubit_generator(Rate g_plus, Rate g_minus, Rate g_z, double omega, std::string label) {
  std::vector<Channel> channels{
      {std::move(g_plus), pauli_ops::plus()},
      {std::move(g_minus), pauli_ops::minus()},
      {std::move(g_z), pauli_ops::z() / std::sqrt(2.0)},
  };
  return build(0.5 * omega * pauli_ops::z(), std::move(channels), nullptr, std::move(label));
}

GklsGenerator dephasing(double gamma) {
  return build(ComplexMatrix::Zero(2, 2), {{gamma, pauli_ops::z() / std::sqrt(2.0)}}, nullptr, "dephasing");
}

GklsGenerator amplitude_damping(double gamma) {
  return build(ComplexMatrix::Zero(2, 2), {{gamma, pauli_ops::minus()}}, nullptr, "amplitude_damping");
}

}  // namespace gkls
