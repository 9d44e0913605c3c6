#pragma once

#include <utility>
#include <vector>

#include "gkls/generator.hpp"
#include "gkls/matcore.hpp"

namespace gkls {

struct RelaxationSpectrum {
  int dim = 0;
  std::vector<Complex> eigenvalues;  // in the order of `rates`
  std::vector<double> rates;         // -Re(lambda), ascending
  std::vector<ComplexMatrix> right_ops;
  std::vector<ComplexMatrix> left_ops;  // Tr(Y_j^+ X_k) = delta_jk
  bool diagonalizable = true;
  double vector_condition = 1.0;
};

struct BoundReport {
  double gamma_max = 0.0;
  double total_over_d = 0.0;
  double margin = 0.0;
  bool satisfied = true;
  bool saturated = false;
};

inline constexpr double kBoundTol = 1e-8;

double bound_tolerance(double gamma_max);

RelaxationSpectrum relaxation_spectrum(const GklsGenerator& g);
RelaxationSpectrum relaxation_spectrum(const Superoperator& s);

BoundReport check_bound(const RelaxationSpectrum& spec, int d);
/// Same check on a bare list of d^2 rates (any order).
BoundReport check_bound(std::vector<double> rates, int d);

struct QubitRates {
  double longitudinal;
  double transversal;
};

/// Gamma_L = g+ + g-, Gamma_T = (g+ + g-)/2 + g_z, with g_z the rate of the
/// normalized sigma_z / sqrt 2 channel.
QubitRates qubit_rates(double g_plus, double g_minus, double g_z);

ComplexMatrix stationary_state(const RelaxationSpectrum& spec);

/// |Gamma_hat_l - Gamma_l| for l >= 1, where Gamma_hat is the commutator
/// form sum_k gamma_k ||[L_k, Y_l]||^2_ss / (2 ||Y_l||^2_ss). Unital generators
/// use I/d even when the zero mode is degenerate. Modes with ||Y_l||_ss = 0
/// give NaN.
std::vector<double> bw_rate_identity(const CanonicalForm& g, const RelaxationSpectrum& spec);

double log_norm(const ComplexMatrix& a, NormKind kind);
double log_norm(const RealMatrix& a, NormKind kind);

}  // namespace gkls
