#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "gkls/classical.hpp"
#include "gkls/generator.hpp"
#include "gkls/spectra.hpp"
#include "support/check.hpp"
#include "support/oracles.hpp"
#include "support/sampling.hpp"

using namespace gkls;

namespace {

RealMatrix mat2(double a, double b, double c, double d) {
  RealMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("validate") {
  CHECK_NOTHROW(validate(RealMatrix::Zero(3, 3)));
  const KolmogorovGenerator k = validate(mat2(-1, 0, 1, 0));
  CHECK(k.dim == 2);
  CHECK(k.transition_rates(1, 0) == 1.0);
  CHECK(k.transition_rates(0, 0) == 0.0);
  CHECK_ERRC(validate(mat2(-1, -0.1, 1, 0.1)), Errc::NegativeOffDiagonal);
  CHECK_ERRC(validate(mat2(-1, 0, 0.5, 0)), Errc::ColumnSumNonzero);
  CHECK_ERRC(validate(RealMatrix::Zero(2, 3)), Errc::NonSquare);
  // tolerance scales with the entries
  CHECK_NOTHROW(validate(mat2(-1e6, 0, 1e6 + 1e-7, 0)));
}

TEST_CASE("from_rates examples") {
  const ClassicalSpectrum s = classical_spectrum(from_rates({1, 2, 3}));
  const std::vector<double> want{0, 1, 2, 3};
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::abs(s.rates[k] - want[k]) < 1e-12);
    CHECK(std::abs(s.eigenvalues[k] + want[k]) < 1e-12);
  }
  const KolmogorovGenerator zero = from_rates({0});
  CHECK(zero.k.norm() == 0.0);
  CHECK(classical_spectrum(zero).rates == std::vector<double>{0, 0});
  const KolmogorovGenerator five = from_rates({5});
  CHECK((five.k - mat2(-5, 0, 5, 0)).norm() == 0.0);
  CHECK_ERRC(from_rates({1, -2}), Errc::NegativeRate);
  CHECK(from_rates({}).dim == 1);
}

TEST_CASE("from_rates realizes arbitrary rate lists, unlike quantum generators") {
  std::mt19937_64 rng(21);
  int beyond_quantum = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> r = sampling::rates(1 + trial % 8, rng);
    if (trial % 3 == 0) r[0] = 50.0;
    const KolmogorovGenerator k = from_rates(r);
    CHECK_NOTHROW(validate(k.k));
    const ClassicalSpectrum s = classical_spectrum(k);
    std::vector<double> want{0.0};
    want.insert(want.end(), r.begin(), r.end());
    std::sort(want.begin(), want.end());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(s.rates[i] - want[i]) <= 1e-10);
    const double total = std::accumulate(r.begin(), r.end(), 0.0);
    if (want.back() > total / static_cast<double>(want.size())) ++beyond_quantum;
  }
  CHECK(beyond_quantum > 30);
}

TEST_CASE("Kolmogorov generators are stochastic and contractive in the one-norm") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 5;
    RealMatrix k = sampling::gaussian_real(d, d, rng).cwiseAbs();
    for (int j = 0; j < d; ++j) {
      k(j, j) = 0.0;
      k(j, j) = -k.col(j).sum();
    }
    const KolmogorovGenerator g = validate(k);
    CHECK(std::abs(log_norm(g.k, NormKind::one)) <= 1e-12);
    CHECK(spectral_abscissa(g.k.cast<Complex>()) <= 1e-12);
    const double t = sampling::uniform(rng, 0.0, 3.0);
    const ComplexMatrix p = expm(t * g.k.cast<Complex>());
    for (int j = 0; j < d; ++j) {
      CHECK(std::abs(p.col(j).sum() - 1.0) < 1e-10);
      for (int i = 0; i < d; ++i) {
        CHECK(p(i, j).real() >= -1e-10);
        CHECK(std::abs(p(i, j).imag()) < 1e-12);
      }
    }
  }
}

TEST_CASE("lindblad_to_kolmogorov") {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const KolmogorovGenerator ad = lindblad_to_kolmogorov(canonical_form(amplitude_damping(1.0)), id);
  CHECK((ad.k - mat2(0, 1, 0, -1)).norm() < 1e-12);
  const KolmogorovGenerator deph = lindblad_to_kolmogorov(canonical_form(dephasing(1.0)), id);
  CHECK(deph.k.norm() < 1e-12);
  CHECK_ERRC(lindblad_to_kolmogorov(canonical_form(dephasing(1.0)), 2.0 * id), Errc::NonOrthonormalBasis);
  CHECK_ERRC(lindblad_to_kolmogorov(canonical_form(dephasing(1.0)), ComplexMatrix::Identity(3, 3)),
             Errc::DimensionMismatch);

  std::mt19937_64 rng(23);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int d = 2 + static_cast<int>(seed % 4);
    const CanonicalForm cf = canonical_form(random_cp(d, 1 + static_cast<int>(seed % (d * d - 1)), seed));
    const ComplexMatrix basis = sampling::unitary(d, rng);
    const KolmogorovGenerator k = lindblad_to_kolmogorov(cf, basis);
    CHECK_NOTHROW(validate(k.k));
    // rates from the direct matrix-element formula
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i == j) continue;
        double r = 0.0;
        for (std::size_t c = 0; c < cf.channels().size(); ++c)
          r += cf.gamma(c) * std::norm(basis.col(i).dot(cf.channels()[c].op * basis.col(j)));
        CHECK(std::abs(k.k(i, j) - r) < 1e-10 * std::max(1.0, r));
      }
  }
}

TEST_CASE("classical_spectrum") {
  CHECK(classical_spectrum(validate(RealMatrix::Zero(3, 3))).rates == std::vector<double>{0, 0, 0});
  RealMatrix cyc = RealMatrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) {
    cyc(i, (i + 2) % 3) = 1.0;
    cyc(i, i) = -1.0;
  }
  const ClassicalSpectrum s = classical_spectrum(validate(cyc));
  CHECK(std::abs(s.rates[0]) < 1e-12);
  CHECK(s.rates[1] == doctest::Approx(1.5));
  CHECK(s.rates[2] == doctest::Approx(1.5));
  CHECK(std::abs(std::abs(s.eigenvalues[1].imag()) - std::sqrt(3.0) / 2) < 1e-12);
  CHECK(std::abs(s.eigenvalues[1] - std::conj(s.eigenvalues[2])) < 1e-12);
  const auto ref = oracle::rates(cyc.cast<Complex>());
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(ref[k] - s.rates[k]) < 1e-8);
}
