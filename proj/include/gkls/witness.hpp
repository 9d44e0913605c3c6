#pragma once

// Time-local relaxation rates of a time-dependent generator and the
// non-Markovianity witness Gamma_max(t) <= (1/d) sum Gamma(t).

#include <string>
#include <string_view>
#include <vector>

#include "gkls/generator.hpp"
#include "gkls/spectra.hpp"

namespace gkls {

struct Interval {
  double start;
  double end;
};

struct WitnessReport {
  int dim = 0;
  std::vector<double> grid;
  std::vector<std::vector<double>> local_rates;  // canonical gamma_l(t), descending, d^2 - 1 each
  std::vector<std::vector<double>> relax_rates;  // Gamma_l(t), ascending, d^2 each
  std::vector<double> margin;
  std::vector<Interval> violations;
  bool cp_divisible = true;
};

inline constexpr double kNegativeRateTol = 1e-10;
inline constexpr double kBisectionResolution = 1e-6;

RelaxationSpectrum local_spectrum(const GklsGenerator& g, double t);

/// Eigenvalues of the Kossakowski matrix of the generator frozen at t,
/// descending, without pruning.
std::vector<double> local_canonical_rates(const GklsGenerator& g, double t);

double local_margin(const GklsGenerator& g, double t);

WitnessReport scan(const GklsGenerator& g, const std::vector<double>& grid);

/// Per grid point, whether 2 Gamma_T(t) >= Gamma_L(t), i.e. 2 T_L >= T_T.
/// g_z is the rate of the normalized sigma_z / sqrt 2 channel.
std::vector<bool> qubit_tt_check(const Rate& g_plus, const Rate& g_minus, const Rate& g_z,
                                 const std::vector<double>& grid);

const std::vector<std::string>& preset_names();
bool is_preset(std::string_view name);
GklsGenerator preset(std::string_view name);

/// L(t_k) = (d/dt Lambda)(t_k) Lambda(t_k)^-1 from a dense grid of dynamical
/// maps, with a three-point derivative.
Superoperator generator_from_maps(const std::vector<Superoperator>& maps, const std::vector<double>& grid,
                                  std::size_t k);

inline constexpr double kMapConditionLimit = 1e10;

}  // namespace gkls
