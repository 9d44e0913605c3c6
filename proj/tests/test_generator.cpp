#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "gkls/generator.hpp"
#include "gkls/spectra.hpp"
#include "gkls/witness.hpp"
#include "support/check.hpp"
#include "support/oracles.hpp"
#include "support/sampling.hpp"

using namespace gkls;

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::vector<oracle::Term> terms_of(const GklsGenerator& g, double t = 0.0) {
  std::vector<oracle::Term> out;
  for (std::size_t k = 0; k < g.channels.size(); ++k) out.push_back({g.rate_at(k, t), g.channels[k].op});
  return out;
}

ComplexMatrix brute(const GklsGenerator& g, double t = 0.0) {
  const auto terms = terms_of(g, t);
  return oracle::superoperator([&](const ComplexMatrix& x) { return oracle::lindblad(g.hamiltonian, terms, x); },
                               g.dim);
}

ComplexMatrix ket_bra(int d, int i, int j) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

std::vector<double> gammas(const CanonicalForm& cf) {
  std::vector<double> g;
  for (std::size_t k = 0; k < cf.channels().size(); ++k) g.push_back(cf.gamma(k));
  return g;
}

// A random generator with arbitrary (non-canonical) channels.
GklsGenerator random_generator(int d, int n, std::mt19937_64& rng) {
  std::vector<Channel> channels;
  for (int k = 0; k < n; ++k) channels.push_back({sampling::uniform(rng, 0.0, 2.0), sampling::gaussian(d, d, rng)});
  return build(sampling::hermitian(d, rng), std::move(channels));
}

}  // namespace

TEST_CASE("build: simple generators") {
  const GklsGenerator ad = build(ComplexMatrix::Zero(2, 2), {{1.0, pauli_ops::minus()}}, nullptr, "ad");
  CHECK(ad.dim == 2);
  CHECK_FALSE(ad.time_dependent);
  CHECK(ad.label == "ad");
  CHECK((reshape(ad).matrix - reshape(amplitude_damping(1.0)).matrix).norm() < 1e-15);

  const GklsGenerator zero = build(ComplexMatrix::Zero(3, 3), {});
  CHECK(reshape(zero).matrix.norm() == 0.0);

  const GklsGenerator q = qubit_generator(0.3, 0.7, 1.1, 2.0);
  CHECK(q.channels.size() == 3);
  CHECK((q.hamiltonian - pauli_ops::z()).norm() < 1e-15);
  CHECK((q.channels[2].op - pauli_ops::z() / kSqrt2).norm() < 1e-15);

  const GklsGenerator td = qubit_generator(1.0, 1.0, parse_rate("sin(t)^2"));
  CHECK(td.time_dependent);
  CHECK(td.rate_at(2, 0.5) == doctest::Approx(std::pow(std::sin(0.5), 2)));
}

TEST_CASE("build: validation") {
  CHECK_ERRC(build(ComplexMatrix::Zero(2, 3), {}), Errc::DimensionMismatch);
  CHECK_ERRC(build(ComplexMatrix::Zero(1, 1), {}), Errc::DimensionMismatch);
  CHECK_ERRC(build(ComplexMatrix::Zero(2, 2), {Channel{1.0, ComplexMatrix::Identity(3, 3)}}), Errc::DimensionMismatch);
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 1) = 1.0;
  CHECK_ERRC(build(h, {}), Errc::NonHermitianHamiltonian);

  std::vector<std::string> warnings;
  build(ComplexMatrix::Zero(2, 2), {Channel{1.0, ComplexMatrix::Identity(2, 2)}}, &warnings);
  CHECK_FALSE(warnings.empty());
  warnings.clear();
  build(ComplexMatrix::Zero(2, 2), {{1.0, pauli_ops::minus()}}, &warnings);
  CHECK(warnings.empty());
}

TEST_CASE("rate evaluation failures") {
  const GklsGenerator g = qubit_generator(1.0, 1.0, parse_rate("1/t"));
  CHECK_ERRC(g.rate_at(2, 0.0), Errc::RateEvalError);
  CHECK_ERRC(reshape(g, 0.0), Errc::RateEvalError);
  CHECK(g.rate_at(2, 2.0) == 0.5);
}

TEST_CASE("apply: worked examples") {
  const ComplexMatrix out = gkls::apply(dephasing(1.0), pauli_ops::x());
  CHECK((out + pauli_ops::x()).norm() < 1e-15);

  const ComplexMatrix ad = gkls::apply(amplitude_damping(1.0), ket_bra(2, 1, 1));
  CHECK((ad - (ket_bra(2, 0, 0) - ket_bra(2, 1, 1))).norm() < 1e-15);
}

TEST_CASE("apply matches the textbook formula and preserves Hermiticity and trace") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 4;
    const GklsGenerator g = random_generator(d, 1 + trial % 5, rng);
    const ComplexMatrix rho = sampling::hermitian(d, rng);
    const ComplexMatrix out = gkls::apply(g, rho);
    const ComplexMatrix ref = oracle::lindblad(g.hamiltonian, terms_of(g), rho);
    CHECK((out - ref).norm() < 1e-12 * std::max(1.0, ref.norm()));
    CHECK((out - out.adjoint()).norm() < 1e-12 * std::max(1.0, out.norm()));
    CHECK(std::abs(out.trace()) < 1e-12 * std::max(1.0, out.norm()));
  }
}

TEST_CASE("adjoint_apply") {
  const GklsGenerator ad = amplitude_damping(1.0);
  CHECK(adjoint_apply(ad, ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
  // sigma_- = |0><1| moves population from |1> to |0>, so the dual raises <sigma_z>.
  const ComplexMatrix z = adjoint_apply(ad, pauli_ops::z());
  CHECK(std::abs(z(1, 1) - Complex(2.0, 0.0)) < 1e-15);
  CHECK((z - (ComplexMatrix::Identity(2, 2) - pauli_ops::z())).norm() < 1e-15);
  CHECK(std::abs(hs_inner(pauli_ops::z(), gkls::apply(ad, ket_bra(2, 1, 1))) - z(1, 1)) < 1e-15);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 3;
    const GklsGenerator g = random_generator(d, 2, rng);
    const ComplexMatrix x = sampling::gaussian(d, d, rng), rho = sampling::gaussian(d, d, rng);
    const Complex lhs = hs_inner(x, gkls::apply(g, rho)), rhs = hs_inner(adjoint_apply(g, x), rho);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
    CHECK(adjoint_apply(g, ComplexMatrix::Identity(d, d)).norm() < 1e-12 * std::max(1.0, g.hamiltonian.norm()));
  }
}

TEST_CASE("reshape agrees with the brute-force superoperator") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 4;
    const GklsGenerator g = random_generator(d, 3, rng);
    const ComplexMatrix ref = brute(g);
    CHECK((reshape(g).matrix - ref).norm() < 1e-12 * ref.norm());
    CHECK(reshape(g).dim == d);
  }
  CHECK(reshape(build(ComplexMatrix::Zero(2, 2), {})).matrix.norm() == 0.0);
  CHECK(reshape(dephasing(1.0)).matrix.trace().real() == doctest::Approx(-2.0));
}

TEST_CASE("trace identity of canonical generators") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int d = 2 + static_cast<int>(seed % 4);
    const GklsGenerator g = random_cp(d, 1 + static_cast<int>(seed % (d * d - 1)), seed);
    const double sum = sampling::rate_sum(g);
    const Complex tr = reshape(g).matrix.trace();
    CHECK(std::abs(tr + static_cast<double>(d) * sum) < 1e-10 * std::max(1.0, sum));

    const RelaxationSpectrum spec = relaxation_spectrum(g);
    double total = 0.0;
    for (double r : spec.rates) total += r;
    CHECK(std::abs(total / d - sum) < 1e-8 * std::max(1.0, sum));
  }
}

TEST_CASE("Gell-Mann basis is traceless and orthonormal") {
  for (int d = 2; d <= 5; ++d) {
    const auto basis = gell_mann_basis(d);
    REQUIRE(basis.size() == static_cast<std::size_t>(d * d - 1));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      CHECK(std::abs(basis[i].trace()) < 1e-15);
      CHECK(is_hermitian(basis[i], 1e-15));
      for (std::size_t j = 0; j < basis.size(); ++j)
        CHECK(std::abs(hs_inner(basis[i], basis[j]) - (i == j ? 1.0 : 0.0)) < 1e-14);
    }
  }
}

TEST_CASE("gks_decompose and assemble are inverse") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 4;
    const GklsGenerator g = random_generator(d, 1 + trial % 4, rng);
    const Superoperator s = reshape(g);
    const GksDecomposition dec = gks_decompose(s);
    CHECK(is_hermitian(dec.kossakowski, 1e-12));
    CHECK(is_hermitian(dec.hamiltonian, 1e-12));
    CHECK(std::abs(dec.hamiltonian.trace()) < 1e-12);
    const Superoperator back = assemble_superoperator(dec.hamiltonian, dec.kossakowski, dec.basis);
    CHECK((back.matrix - s.matrix).norm() <= 1e-8 * std::max(1.0, s.matrix.norm()));
  }
  const GksDecomposition zero = gks_decompose(Superoperator{ComplexMatrix::Zero(9, 9), 3});
  CHECK(zero.hamiltonian.norm() < 1e-15);
  CHECK(zero.kossakowski.norm() < 1e-15);
}

TEST_CASE("gks_decompose of a canonical generator in its own basis is diagonal") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const int d = 2 + static_cast<int>(seed % 3);
    const GklsGenerator g = random_cp(d, d * d - 1, seed);
    REQUIRE(g.channels.size() == static_cast<std::size_t>(d * d - 1));
    std::vector<ComplexMatrix> basis;
    for (const auto& c : g.channels) basis.push_back(c.op);
    const GksDecomposition dec = gks_decompose(reshape(g), &basis);
    for (int i = 0; i < d * d - 1; ++i)
      for (int j = 0; j < d * d - 1; ++j) {
        const double want = i == j ? g.rate_at(static_cast<std::size_t>(i), 0.0) : 0.0;
        CHECK(std::abs(dec.kossakowski(i, j) - want) < 1e-10);
      }
  }
}

TEST_CASE("gks_decompose rejects maps that are not generators") {
  CHECK_ERRC(gks_decompose(Superoperator{ComplexMatrix::Identity(4, 4), 2}), Errc::NotTracePreserving);
  const ComplexMatrix a = pauli_ops::plus();
  const ComplexMatrix s =
      oracle::superoperator([&](const ComplexMatrix& x) -> ComplexMatrix { return a * x - x * a; }, 2);
  CHECK_ERRC(gks_decompose(Superoperator{s, 2}), Errc::NotHermiticityPreserving);
  CHECK_ERRC(gks_decompose(Superoperator{ComplexMatrix::Zero(5, 5), 2}), Errc::DimensionMismatch);
  std::vector<ComplexMatrix> bad(3, pauli_ops::x() / kSqrt2);
  CHECK_ERRC(gks_decompose(reshape(dephasing(1.0)), &bad), Errc::NonOrthonormalBasis);
}

TEST_CASE("canonicalize: identity Kossakowski matrix") {
  const std::vector<ComplexMatrix> paulis{pauli_ops::x() / kSqrt2, pauli_ops::y() / kSqrt2, pauli_ops::z() / kSqrt2};
  const CanonicalForm cf = canonicalize(ComplexMatrix::Zero(2, 2), ComplexMatrix::Identity(3, 3), paulis);
  REQUIRE(cf.channels().size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(cf.gamma(k) == doctest::Approx(1.0));
  CHECK(cf.gamma_sum == doctest::Approx(3.0));
  CHECK(cf.completely_positive);

  ComplexMatrix c = ComplexMatrix::Identity(3, 3);
  c(0, 1) = 1.0;
  CHECK_ERRC(canonicalize(ComplexMatrix::Zero(2, 2), c, paulis), Errc::NonHermitianKossakowski);
}

TEST_CASE("canonical form is stable under re-canonicalization") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 3;
    const GklsGenerator g = random_generator(d, 1 + trial % 3, rng);
    const CanonicalForm a = canonical_form(g);
    const CanonicalForm b = canonical_form(a.base);
    const auto ga = gammas(a), gb = gammas(b);
    REQUIRE(ga.size() == gb.size());
    CHECK(std::is_sorted(ga.rbegin(), ga.rend()));
    for (std::size_t k = 0; k < ga.size(); ++k) {
      CHECK(std::abs(ga[k] - gb[k]) < 1e-9 * std::max(1.0, std::abs(ga[k])));
      CHECK(std::abs(a.channels()[k].op.trace()) < 1e-12);
      for (std::size_t l = 0; l < ga.size(); ++l)
        CHECK(std::abs(hs_inner(a.channels()[k].op, a.channels()[l].op) - (k == l ? 1.0 : 0.0)) < 1e-10);
    }
    // the canonical generator is the same map
    CHECK((reshape(a.base).matrix - reshape(g).matrix).norm() < 1e-9 * std::max(1.0, reshape(g).matrix.norm()));
    double sum = 0.0;
    for (double x : ga) sum += x;
    CHECK(a.gamma_sum == doctest::Approx(sum));
  }
}

TEST_CASE("canonical rates of the eternal non-Markovian example") {
  const GklsGenerator q = qubit_generator(1.0, 1.0, parse_rate("-0.5*tanh(t)"));
  const auto gs = gammas(canonical_form(q, 1.0));
  REQUIRE(gs.size() == 3);
  CHECK(gs[0] == doctest::Approx(1.0));
  CHECK(gs[1] == doctest::Approx(1.0));
  CHECK(gs[2] == doctest::Approx(-0.5 * std::tanh(1.0)).epsilon(1e-10));
  CHECK(gs[2] == doctest::Approx(-0.3808).epsilon(1e-3));
  CHECK_FALSE(canonical_form(q, 1.0).completely_positive);

  const GksDecomposition dec = gks_decompose(reshape(q, 1.0));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(dec.kossakowski);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-0.5 * std::tanh(1.0)).epsilon(1e-10));
  CHECK(es.eigenvalues()(1) > 0.0);

  // The preset writes the same dissipator with the bare sigma_z.
  const auto gp = gammas(canonical_form(preset("eternal_nm"), 1.0));
  CHECK(gp.back() == doctest::Approx(-std::tanh(1.0)).epsilon(1e-10));
  CHECK(canonical_form(preset("eternal_nm"), 0.0).completely_positive);
}

TEST_CASE("frozen generators") {
  const GklsGenerator q = qubit_generator(1.0, 1.0, parse_rate("-0.5*tanh(t)"));
  const GklsGenerator f = frozen(q, 2.0);
  CHECK_FALSE(f.time_dependent);
  CHECK((reshape(f).matrix - reshape(q, 2.0).matrix).norm() < 1e-15);
  CHECK(std::get<double>(f.channels[2].rate) == doctest::Approx(-0.5 * std::tanh(2.0)));
}

TEST_CASE("extend: amplitude damping by one level") {
  const GklsGenerator ext = extend(amplitude_damping(1.0), 1);
  CHECK(ext.dim == 3);
  const RelaxationSpectrum spec = relaxation_spectrum(ext);
  const std::vector<double> want{0, 0, 0, 0, 0.5, 0.5, 0.5, 0.5, 1};
  REQUIRE(spec.rates.size() == 9);
  for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(spec.rates[k] - want[k]) < 1e-10);
  // root-finding on a fourfold root only resolves it to about eps^(1/4)
  const auto ref = oracle::rates(brute(ext));
  for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(ref[k] - want[k]) < 5e-4);
  double total = 0.0;
  for (double r : spec.rates) total += r;
  CHECK(total == doctest::Approx(3.0));
  CHECK_ERRC(extend(preset("eternal_nm"), 1), Errc::TimeDependentNotSupported);
  CHECK_ERRC(extend(amplitude_damping(1.0), 0), Errc::InvalidArgument);
}

TEST_CASE("extend keeps the original spectrum and scales the rate sum") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const int d = 2 + static_cast<int>(seed % 2);
    const GklsGenerator g = random_cp(d, d * d - 1, seed);
    const RelaxationSpectrum small = relaxation_spectrum(g);
    const RelaxationSpectrum big = relaxation_spectrum(extend(g, 1));
    for (const auto& z : small.eigenvalues) {
      double best = 1e300;
      for (const auto& w : big.eigenvalues) best = std::min(best, std::abs(z - w));
      CHECK(best < 1e-8 * std::max(1.0, std::abs(z)));
    }
    double s = 0.0, b = 0.0;
    for (double r : small.rates) s += r;
    for (double r : big.rates) b += r;
    CHECK(std::abs(b - (1.0 + 1.0 / d) * s) < 1e-8 * std::max(1.0, s));
  }
}

TEST_CASE("effective non-Hermitian Hamiltonian") {
  std::mt19937_64 rng(6);
  const GklsGenerator g = random_generator(3, 2, rng);
  const ComplexMatrix k = effective_hamiltonian_k(g);
  const ComplexMatrix rho = sampling::density(3, rng);
  ComplexMatrix jump = ComplexMatrix::Zero(3, 3);
  for (std::size_t c = 0; c < g.channels.size(); ++c)
    jump += g.rate_at(c, 0.0) * g.channels[c].op * rho * g.channels[c].op.adjoint();
  CHECK((gkls::apply(g, rho) - (k * rho + rho * k.adjoint() + jump)).norm() < 1e-12);
}

TEST_CASE("random_cp") {
  const GklsGenerator a = random_cp(3, 4, 77), b = random_cp(3, 4, 77), c = random_cp(3, 4, 78);
  CHECK((reshape(a).matrix - reshape(b).matrix).norm() == 0.0);
  CHECK((reshape(a).matrix - reshape(c).matrix).norm() > 0.0);
  CHECK(a.label == b.label);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int d = 2 + static_cast<int>(seed % 4);
    const GklsGenerator g = random_cp(d, 1 + static_cast<int>(seed % (d * d - 1)), seed);
    const CanonicalForm cf = canonical_form(g);
    CHECK(cf.completely_positive);
    for (double x : gammas(cf)) CHECK(x >= 0.0);
  }
  CHECK(check_bound(relaxation_spectrum(random_cp(3, 8, 42)), 3).satisfied);
  CHECK_ERRC(random_cp(1, 1, 0), Errc::DimensionMismatch);
  CHECK_ERRC(random_cp(2, 4, 0), Errc::BadChannelCount);
  CHECK_ERRC(random_cp(2, 0, 0), Errc::BadChannelCount);
}

TEST_CASE("random_state is a full-rank density matrix") {
  for (int d = 2; d <= 5; ++d) {
    const ComplexMatrix rho = random_state(d, static_cast<std::uint64_t>(d));
    CHECK(std::abs(rho.trace() - 1.0) < 1e-14);
    CHECK(is_hermitian(rho, 1e-15));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  CHECK((random_state(3, 9) - random_state(3, 9)).norm() == 0.0);
}
