#pragma once

// Density-matrix trajectories, their instantaneous eigensystems, and the
// classical rate equation p' = W(t) p obeyed by the populations.

#include <string>
#include <vector>

#include "gkls/generator.hpp"
#include "gkls/integrate.hpp"
#include "gkls/matcore.hpp"
#include "gkls/spectra.hpp"

namespace gkls {

struct Trajectory {
  std::vector<double> grid;
  std::vector<ComplexMatrix> states;
};

struct EigenTrack {
  std::vector<double> grid;
  std::vector<RealVector> populations;
  std::vector<ComplexMatrix> frames;  // columns psi_i(t)
};

struct RateMatrix {
  RealMatrix w;
  RealMatrix r;
  double t = 0.0;
};

/// rho0 must be Hermitian with unit trace (Errc::InvalidState otherwise) and
/// is taken to be the state at t = 0; grid points may lie on either side.
Trajectory evolve(const GklsGenerator& g, const ComplexMatrix& rho0, const std::vector<double>& grid,
                  const StepControl& control = {});

/// Eigenvalues below this separation are treated as one degenerate block.
inline constexpr double kDegenerateGap = 1e-12;
inline constexpr double kTrackingFloor = 0.5;

EigenTrack spectral_track(const Trajectory& traj);

/// R_ij = sum_n gamma_n(t) |<psi_i, L_n psi_j>|^2 and W = R - diag(column sums of R).
RateMatrix rate_matrix(const GklsGenerator& g, const ComplexMatrix& frame, double t);
RateMatrix teich_mahler(const CanonicalForm& g, const EigenTrack& track, std::size_t k);

/// |p'(t_k) - W(t_k) p(t_k)|_2 with a three-point derivative; k must have
/// neighbours on both sides.
double pauli_residual(const GklsGenerator& g, const EigenTrack& track, std::size_t k);

/// w_n^(i) = sum_{j != i} |<psi_j, L_n psi_i>|^2 + |<psi_j, L_n^+ psi_i>|^2,
/// one row per channel.
RealMatrix w_quantity(const CanonicalForm& g, const ComplexMatrix& frame);
RealMatrix w_quantity(const CanonicalForm& g, const EigenTrack& track, std::size_t k);

/// F(t_k, t_j) as an ordered product of exp(h (W_m + W_{m+1}) / 2).
RealMatrix classical_propagator(const GklsGenerator& g, const EigenTrack& track, std::size_t j, std::size_t k);

/// q_i(t) = <psi_i(t), Q(t) psi_i(t)> for the slowest-decaying-backward mode,
/// so that p(t) ~ exp(-Gamma_max t) q(t) as t -> -infinity.
std::vector<RealVector> dominant_profile(const RelaxationSpectrum& spec, const ComplexMatrix& rho0,
                                         const EigenTrack& track);

struct TrackRow {
  double time;
  RealVector populations;
  double residual;  // NaN at the ends of the grid
  double w_inf_norm;
  double min_w_slack;  // 1 - max w_n^(i)
};

std::vector<TrackRow> track_table(const GklsGenerator& g, const EigenTrack& track);

}  // namespace gkls
