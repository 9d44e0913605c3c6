#include <algorithm>
#include <random>

#include "doctest.h"
#include "gkls/error.hpp"
#include "gkls/generator.hpp"
#include "gkls/matcore.hpp"
#include "support/oracles.hpp"
#include "support/sampling.hpp"

using namespace gkls;

namespace {

std::vector<double> sorted_real(const std::vector<Complex>& v) {
  std::vector<double> r;
  for (const auto& z : v) r.push_back(z.real());
  std::sort(r.begin(), r.end());
  return r;
}

ComplexMatrix real2(double a, double b, double c, double d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("eig of a diagonal matrix") {
  const EigResult e = eig(real2(1, 0, 0, 2));
  const auto v = sorted_real(e.values);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(2.0));
  for (Eigen::Index k = 0; k < 2; ++k) CHECK(e.right_vectors.col(k).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK_FALSE(e.near_defective());
}

TEST_CASE("eig flags a Jordan block as near defective") {
  const EigResult e = eig(real2(0, 1, 0, 0));
  for (const auto& z : e.values) CHECK(std::abs(z) < 1e-12);
  CHECK(e.vector_condition >= kDefectThreshold);
  CHECK(e.near_defective());
}

TEST_CASE("eig of the reshaped dephasing superoperator matches the characteristic polynomial") {
  const GklsGenerator g = dephasing(1.0);
  const ComplexMatrix s = oracle::superoperator([&](const ComplexMatrix& x) { return apply(g, x); }, 2);
  const auto ours = sorted_real(eig(s).values);
  std::vector<double> ref;
  for (const auto& z : oracle::eigenvalues(s)) ref.push_back(z.real());
  std::sort(ref.begin(), ref.end());
  const std::vector<double> expected{-1, -1, 0, 0};
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(ours[k] - expected[k]) < 1e-12);
    CHECK(std::abs(ref[k] - expected[k]) < 1e-6);
  }
}

TEST_CASE("eig reconstructs well-conditioned matrices") {
  std::mt19937_64 rng(11);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    const ComplexMatrix m = sampling::gaussian(n, n, rng);
    const EigResult e = eig(m);
    if (e.vector_condition >= 1e6) continue;
    ++tested;
    ComplexMatrix lambda = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) lambda(k, k) = e.values[static_cast<std::size_t>(k)];
    const ComplexMatrix rec = e.right_vectors * lambda * e.right_vectors.inverse();
    CHECK((rec - m).norm() <= 1e-8 * m.norm());
    // left vectors are biorthonormal to the right ones
    const ComplexMatrix gram = e.left_vectors.adjoint() * e.right_vectors;
    CHECK((gram - ComplexMatrix::Identity(n, n)).norm() < 1e-8 * e.vector_condition);
  }
  CHECK(tested > 150);
}

TEST_CASE("eig agrees with the characteristic-polynomial oracle on small matrices") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 4;
    const ComplexMatrix m = sampling::gaussian(n, n, rng);
    auto ours = eigenvalues(m);
    auto ref = oracle::eigenvalues(m);
    for (const auto& z : ref) {
      double best = 1e300;
      for (const auto& w : ours) best = std::min(best, std::abs(z - w));
      CHECK(best < 1e-7 * (1.0 + std::abs(z)));
    }
  }
}

TEST_CASE("eig rejects bad input") {
  CHECK_THROWS_AS(eig(ComplexMatrix::Zero(2, 3)), Error);
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    eig(m);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() != Errc::NonSquare);
  }
  try {
    eig(ComplexMatrix::Zero(3, 2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonSquare);
  }
}

TEST_CASE("expm basics") {
  CHECK((expm(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() < 1e-15);
  const ComplexMatrix e = expm(real2(std::log(2.0), 0, 0, 0));
  CHECK((e - real2(2, 0, 0, 1)).norm() < 1e-14);
}

TEST_CASE("expm matches a Taylor-series oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 8;
    const double scale = 0.1 + 0.3 * (trial % 10);
    const ComplexMatrix a = sampling::gaussian(n, n, rng, scale);
    const ComplexMatrix ref = oracle::expm_taylor(a);
    CHECK((expm(a) - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("expm of commuting matrices factorizes") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 5;
    const ComplexMatrix x = sampling::gaussian(n, n, rng, 0.4);
    const ComplexMatrix a = 0.7 * x + 0.2 * x * x;
    const ComplexMatrix b = -0.3 * x + 0.1 * x * x * x + ComplexMatrix::Identity(n, n) * Complex(0.2, -0.1);
    const ComplexMatrix lhs = expm(a + b);
    CHECK((lhs - expm(a) * expm(b)).norm() <= 1e-10 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("expm of a CP generator preserves trace against an ODE oracle") {
  const GklsGenerator g = random_cp(3, 8, 2024);
  std::mt19937_64 rng(8);
  const ComplexMatrix rho0 = sampling::density(3, rng);
  const Superoperator s = reshape(g);
  const ComplexMatrix rho = unvec(expm(0.7 * s.matrix) * vec(rho0), 3);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
  const ComplexMatrix ode =
      oracle::rk38([&](double, const ComplexMatrix& r) { return apply(g, r); }, rho0, 0.0, 0.7, 2000);
  CHECK((rho - ode).norm() < 1e-10);
}

TEST_CASE("Hilbert-Schmidt inner product") {
  CHECK(hs_inner(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) == Complex(2.0, 0.0));
  CHECK(std::abs(hs_inner(pauli_ops::plus(), pauli_ops::plus()) - 1.0) < 1e-15);
  CHECK(std::abs(hs_inner(pauli_ops::z() / std::sqrt(2.0), pauli_ops::x() / std::sqrt(2.0))) < 1e-15);
  CHECK_THROWS_AS(hs_inner(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)), Error);
}

TEST_CASE("matrix norms") {
  const ComplexMatrix a = real2(-1, 2, 0, -3);
  CHECK(matrix_norm(a, NormKind::inf) == doctest::Approx(3.0));
  CHECK(matrix_norm(a, NormKind::one) == doctest::Approx(5.0));
  CHECK(matrix_norm(real2(3, 0, 0, -4), NormKind::two) == doctest::Approx(4.0));
  CHECK(matrix_norm(a, NormKind::frobenius) == doctest::Approx(std::sqrt(14.0)));
}

TEST_CASE("spectral radius is below every norm") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 7;
    const ComplexMatrix a = sampling::gaussian(n, n, rng);
    const double rho = spectral_radius(a);
    for (auto kind : {NormKind::one, NormKind::two, NormKind::inf, NormKind::frobenius})
      CHECK(rho <= matrix_norm(a, kind) * (1.0 + 1e-12));
  }
}

TEST_CASE("qr examples") {
  const QrResult id = qr(ComplexMatrix::Identity(3, 3));
  CHECK((id.q - ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
  CHECK((id.r - ComplexMatrix::Identity(3, 3)).norm() < 1e-14);

  const QrResult tri = qr(real2(2, 1, 0, 3));
  CHECK((tri.q - ComplexMatrix::Identity(2, 2)).norm() < 1e-14);
  CHECK((tri.r - real2(2, 1, 0, 3)).norm() < 1e-14);

  std::mt19937_64 rng(4);
  const ComplexMatrix u = sampling::unitary(4, rng);
  const QrResult f = qr(u);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(f.r(i, i).imag()) < 1e-14);
    CHECK(f.r(i, i).real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK((f.q * f.r - u).norm() < 1e-12);
}

TEST_CASE("qr factors random matrices and preserves the determinant") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 8;
    const ComplexMatrix m = sampling::gaussian(n, n, rng);
    const QrResult f = qr(m);
    CHECK((f.q * f.r - m).norm() < 1e-12 * std::max(1.0, m.norm()));
    CHECK((f.q.adjoint() * f.q - ComplexMatrix::Identity(n, n)).norm() < 1e-12);
    Complex prod = 1.0;
    for (int i = 0; i < n; ++i) {
      CHECK(f.r(i, i).real() > 0.0);
      CHECK(std::abs(f.r(i, i).imag()) < 1e-14 * std::abs(f.r(i, i)));
      for (int j = 0; j < i; ++j) CHECK(std::abs(f.r(i, j)) == 0.0);
      prod *= f.r(i, i);
    }
    const double det = std::abs(m.determinant());
    CHECK(std::abs(std::abs(prod) - det) <= 1e-10 * det);
  }
}

TEST_CASE("qr of a rank-deficient matrix") {
  try {
    qr(real2(1, 2, 2, 4));
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RankDeficient);
  }
}

TEST_CASE("kron and row-major vectorization") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const ComplexMatrix a = sampling::gaussian(d, d, rng), b = sampling::gaussian(d, d, rng),
                        x = sampling::gaussian(d, d, rng);
    CHECK((kron(a, b.transpose()) * vec(x) - vec(a * x * b)).norm() < 1e-12 * (1 + (a * x * b).norm()));
    CHECK((unvec(vec(x), d) - x).norm() == 0.0);
  }
  ComplexMatrix x(2, 2);
  x << 1, 2, 3, 4;
  const ComplexVector v = vec(x);
  CHECK(v(1) == Complex(2.0, 0.0));
  CHECK(v(2) == Complex(3.0, 0.0));
}

TEST_CASE("commutators and Hermitian parts") {
  std::mt19937_64 rng(6);
  const ComplexMatrix a = sampling::gaussian(3, 3, rng), b = sampling::gaussian(3, 3, rng);
  CHECK((commutator(a, b) - (a * b - b * a)).norm() < 1e-14);
  CHECK((anticommutator(a, b) - (a * b + b * a)).norm() < 1e-14);
  CHECK(is_hermitian(hermitian_part(a), 1e-14));
  CHECK_FALSE(is_hermitian(a, 1e-6));
}

TEST_CASE("spectral abscissa") {
  CHECK(spectral_abscissa(real2(-1, 5, 0, -3)) == doctest::Approx(-1.0));
  CHECK(spectral_radius(real2(-1, 5, 0, -3)) == doctest::Approx(3.0));
}
