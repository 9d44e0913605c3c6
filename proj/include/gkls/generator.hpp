#pragma once

// GKLS generators L(rho) = -i[H, rho] + sum_l gamma_l (L_l rho L_l^+ - 1/2 {L_l^+ L_l, rho})
// in dense form, plus the reshaped d^2 x d^2 superoperator.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gkls/matcore.hpp"
#include "gkls/ratelang.hpp"

namespace gkls {

using Rate = std::variant<double, RateExpr>;

struct Channel {
  Rate rate;
  ComplexMatrix op;
};

struct GklsGenerator {
  int dim = 0;
  ComplexMatrix hamiltonian;
  std::vector<Channel> channels;
  bool time_dependent = false;
  std::string label;

  /// Rate of channel k at time t. Expression failures surface as
  /// Errc::RateEvalError.
  double rate_at(std::size_t k, double t) const;
  std::vector<double> rates_at(double t) const;
};

struct Superoperator {
  ComplexMatrix matrix;
  int dim = 0;
};

struct CanonicalForm {
  GklsGenerator base;  // time-autonomous, noise operators traceless and orthonormal
  double gamma_sum = 0.0;
  bool completely_positive = true;

  const std::vector<Channel>& channels() const { return base.channels; }
  double gamma(std::size_t k) const { return std::get<double>(base.channels[k].rate); }
};

struct GksDecomposition {
  ComplexMatrix hamiltonian;
  ComplexMatrix kossakowski;
  std::vector<ComplexMatrix> basis;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPruneTol = 1e-12;

/// Validates shapes and Hermiticity of H. Channels that are not traceless
/// and orthonormal are accepted; a note is appended to *warnings when given.
GklsGenerator build(const ComplexMatrix& hamiltonian, std::vector<Channel> channels,
                    std::vector<std::string>* warnings = nullptr, std::string label = {});

ComplexMatrix apply(const GklsGenerator& g, const ComplexMatrix& rho, double t = 0.0);
ComplexMatrix adjoint_apply(const GklsGenerator& g, const ComplexMatrix& x, double t = 0.0);

Superoperator reshape(const GklsGenerator& g, double t = 0.0);

/// Generalized Gell-Mann matrices normalized to Tr(F_i^+ F_j) = delta_ij:
/// symmetric, antisymmetric, then diagonal.
std::vector<ComplexMatrix> gell_mann_basis(int d);

/// Splits a superoperator into Hamiltonian and Kossakowski parts with respect
/// to a traceless orthonormal basis (Gell-Mann when none is given).
GksDecomposition gks_decompose(const Superoperator& s, const std::vector<ComplexMatrix>* basis = nullptr);

/// Inverse of gks_decompose.
Superoperator assemble_superoperator(const ComplexMatrix& hamiltonian, const ComplexMatrix& kossakowski,
                                     const std::vector<ComplexMatrix>& basis);

CanonicalForm canonicalize(const ComplexMatrix& hamiltonian, const ComplexMatrix& kossakowski,
                           const std::vector<ComplexMatrix>& basis);

/// Canonical form of the generator frozen at time t.
CanonicalForm canonical_form(const GklsGenerator& g, double t = 0.0);

/// The generator with every rate evaluated at t.
GklsGenerator frozen(const GklsGenerator& g, double t);

/// Embeds the generator in dimension d + d_ext: H and every L_l are padded
/// with zeros, which acts as L on the upper block, K A and A^+ K^+ on the
/// off-diagonal blocks and 0 on the lower block.
GklsGenerator extend(const GklsGenerator& g, int d_ext);

/// -i H - 1/2 sum gamma_l L_l^+ L_l
ComplexMatrix effective_hamiltonian_k(const GklsGenerator& g, double t = 0.0);

GklsGenerator random_cp(int d, int n_channels, std::uint64_t seed);

/// Full-rank density matrix M M^+ / Tr(M M^+) with M complex Gaussian.
ComplexMatrix random_state(int d, std::uint64_t seed);

namespace pauli_ops {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
ComplexMatrix plus();   // |1><0|
ComplexMatrix minus();  // |0><1|
}  // namespace pauli_ops

/// -i omega/2 [sigma_z, .] with channels (g_plus, sigma_+), (g_minus, sigma_-),
/// (g_z, sigma_z / sqrt 2). Zero rates are kept as channels.
GklsGenerator qubit_generator(Rate g_plus, Rate g_minus, Rate g_z, double omega = 0.0, std::string label = {});

GklsGenerator dephasing(double gamma = 1.0);
GklsGenerator amplitude_damping(double gamma = 1.0);

}  // namespace gkls
