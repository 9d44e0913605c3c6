#pragma once

// Classical Kolmogorov generators: p' = K p with K_ij >= 0 off the diagonal
// and vanishing column sums.

#include <vector>

#include "gkls/generator.hpp"
#include "gkls/matcore.hpp"

namespace gkls {

struct KolmogorovGenerator {
  int dim = 0;
  RealMatrix k;
  RealMatrix transition_rates;  // R_ij = K_ij off the diagonal, zero on it
};

inline constexpr double kKolmogorovTol = 1e-12;

KolmogorovGenerator validate(const RealMatrix& k);

/// K_11 = -r_1, K_1j = r_j and K_jj = -r_j for 2 <= j <= d-1, K_d1 = r_1,
/// last column zero. The spectrum is {0, -r_1, ..., -r_{d-1}}.
KolmogorovGenerator from_rates(const std::vector<double>& r);

/// K_ij = <i| L(|j><j|) |i> in the given orthonormal basis (columns).
KolmogorovGenerator lindblad_to_kolmogorov(const CanonicalForm& g, const ComplexMatrix& basis);

struct ClassicalSpectrum {
  std::vector<Complex> eigenvalues;  // in the order of `rates`
  std::vector<double> rates;         // -Re, ascending
};

ClassicalSpectrum classical_spectrum(const KolmogorovGenerator& k);

}  // namespace gkls
