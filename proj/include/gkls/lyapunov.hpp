#pragma once

// Lyapunov exponents of the backward population flow and of the reshaped
// auxiliary flow G' = -L(t) G.

#include <optional>
#include <vector>

#include "gkls/error.hpp"
#include "gkls/generator.hpp"
#include "gkls/integrate.hpp"
#include "gkls/matcore.hpp"

namespace gkls {

struct WindowRecord {
  double window_start;
  double window_chi;
  double cumulative_chi;
};

struct LyapunovEstimate {
  double chi = 0.0;
  std::optional<std::vector<double>> spectrum;  // ascending
  double burn_in = 0.0;
  double horizon = 0.0;
  double convergence_gap = 0.0;
  bool converged = true;
  std::vector<WindowRecord> windows;
};

inline constexpr double kBurnInFraction = 0.2;
inline constexpr double kConvergenceLimit = 1e-2;
inline constexpr double kGenericOverlap = 1e-8;

/// Raised when the estimate has not settled; the partial estimate is kept.
class UnconvergedError : public Error {
 public:
  UnconvergedError(LyapunovEstimate estimate, const std::string& what)
      : Error(Errc::Unconverged, what), estimate_(std::move(estimate)) {}
  const LyapunovEstimate& estimate() const noexcept { return estimate_; }

 private:
  LyapunovEstimate estimate_;
};

struct LyapunovOptions {
  NormKind norm = NormKind::two;
  /// When false an unconverged run is returned with converged = false
  /// instead of throwing.
  bool throw_on_unconverged = true;
  StepControl step;
};

/// chi = lim sup -(1/t) ln |p(t)| for t -> -infinity, where p(t) are the
/// eigenvalues of rho(t). The rate over a window is the least-squares slope
/// of the accumulated log growth; chi is the largest of the rates over the
/// post-burn-in window and its last half and last quarter.
LyapunovEstimate max_exponent_backward(const GklsGenerator& g, const ComplexMatrix& rho0, double horizon,
                                       double renorm_interval = 0.0, const LyapunovOptions& options = {});

/// Full spectrum of G' = -L(t) G by periodic QR re-factorization.
LyapunovEstimate qr_spectrum(const GklsGenerator& g, double horizon, double reortho_interval = 0.0,
                             const LyapunovOptions& options = {});

struct DivisibilityReport {
  double lhs = 0.0;                // largest exponent
  double rhs_cp = 0.0;             // (1/d) sum of exponents
  double correction_sup = 0.0;     // sup_t sum_l (|gamma_l| - gamma_l) / d
  double correction_mean = 0.0;    // time average of the same quantity
  bool cp_bound_holds = true;      // lhs <= rhs_cp
  bool corrected_bound_holds = true;  // lhs <= rhs_cp + correction_sup
  LyapunovEstimate estimate;
};

DivisibilityReport divisibility_bounds(const GklsGenerator& g, double horizon, double reortho_interval = 0.0,
                                       const LyapunovOptions& options = {});

/// Sum_l gamma_l(t) of the canonical form at t, i.e. -(1/d) Tr L(t).
double canonical_rate_sum(const GklsGenerator& g, double t);

}  // namespace gkls
