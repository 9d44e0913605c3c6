#include "gkls/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gkls/error.hpp"
#include "gkls/parallel.hpp"

namespace gkls {

namespace {

struct LocalBound {
  double margin;
  bool violated;
};

LocalBound local_bound(const GklsGenerator& g, double t) {
  const BoundReport b = check_bound(local_spectrum(g, t), g.dim);
  return {b.margin, !b.satisfied};
}

// Narrows [a, b] around the change of violation state; returns the end on
// b's side.
double bisect(const GklsGenerator& g, double a, double b, bool violating_at_b) {
  while (std::abs(b - a) > kBisectionResolution) {
    const double mid = 0.5 * (a + b);
    if (local_bound(g, mid).violated == violating_at_b) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return b;
}

}  // namespace

RelaxationSpectrum local_spectrum(const GklsGenerator& g, double t) { return relaxation_spectrum(reshape(g, t)); }

std::vector<double> local_canonical_rates(const GklsGenerator& g, double t) {
  const GksDecomposition dec = gks_decompose(reshape(g, t));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(dec.kossakowski, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double local_margin(const GklsGenerator& g, double t) { return local_bound(g, t).margin; }

WitnessReport scan(const GklsGenerator& g, const std::vector<double>& grid) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) throw Error(Errc::InvalidArgument, "grid contains a non-finite time");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw Error(Errc::InvalidArgument, "grid must be strictly increasing");
  }
  WitnessReport rep;
  rep.dim = g.dim;
  rep.grid = grid;
  const std::size_t n = grid.size();
  rep.local_rates.resize(n);
  rep.relax_rates.resize(n);
  rep.margin.resize(n);
  std::vector<char> violated(n, 0);

  parallel_for(n, [&](std::size_t k) {
    rep.local_rates[k] = local_canonical_rates(g, grid[k]);
    const RelaxationSpectrum spec = local_spectrum(g, grid[k]);
    const BoundReport b = check_bound(spec, g.dim);
    rep.relax_rates[k] = spec.rates;
    rep.margin[k] = b.margin;
    violated[k] = b.satisfied ? 0 : 1;
  });

  for (const auto& rates : rep.local_rates)
    if (!rates.empty() && rates.back() < -kNegativeRateTol) rep.cp_divisible = false;

  for (std::size_t k = 0; k < n;) {
    if (!violated[k]) {
      ++k;
      continue;
    }
    std::size_t j = k;
    while (j + 1 < n && violated[j + 1]) ++j;
    Interval iv{grid[k], grid[j]};
    if (k > 0) iv.start = bisect(g, grid[k - 1], grid[k], true);
    if (j + 1 < n) {
      // Last violating point: bisect from the satisfied side back towards the run.
      double a = grid[j], b = grid[j + 1];
      while (b - a > kBisectionResolution) {
        const double mid = 0.5 * (a + b);
        if (local_bound(g, mid).violated) {
          a = mid;
        } else {
          b = mid;
        }
      }
      iv.end = a;
    }
    rep.violations.push_back(iv);
    k = j + 1;
  }
  return rep;
}

std::vector<bool> qubit_tt_check(const Rate& g_plus, const Rate& g_minus, const Rate& g_z,
                                 const std::vector<double>& grid) {
  auto eval = [](const Rate& r, double t) {
    if (const auto* v = std::get_if<double>(&r)) return *v;
    try {
      return std::get<RateExpr>(r).eval(t);
    } catch (const Error& e) {
      throw Error(Errc::RateEvalError, std::string("at t = ") + std::to_string(t) + ": " + e.what());
    }
  };
  std::vector<bool> out;
  out.reserve(grid.size());
  for (const double t : grid) {
    const QubitRates q = qubit_rates(eval(g_plus, t), eval(g_minus, t), eval(g_z, t));
    if (!(q.longitudinal > 0.0) || !(q.transversal > 0.0))
      throw Error(Errc::ZeroRate, "Gamma_L = " + std::to_string(q.longitudinal) + ", Gamma_T = " +
                                      std::to_string(q.transversal) + " at t = " + std::to_string(t));
    const double tol = 2.0 * bound_tolerance(std::max(q.longitudinal, q.transversal));
    out.push_back(2.0 * q.transversal - q.longitudinal >= -tol);
  }
  return out;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"eternal_nm", "dephasing", "amplitude_damping", "paper_qubit"};
  return names;
}

bool is_preset(std::string_view name) {
  const auto& names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

GklsGenerator preset(std::string_view name) {
  if (name == "eternal_nm") {
    // Dissipator written with the bare sigma_z, so the canonical rate is -tanh t.
    std::vector<Channel> channels{
        {1.0, pauli_ops::plus()},
        {1.0, pauli_ops::minus()},
        {parse_rate("-0.5*tanh(t)"), pauli_ops::z()},
    };
    return build(ComplexMatrix::Zero(2, 2), std::move(channels), nullptr, "eternal_nm");
  }
  if (name == "dephasing") return dephasing(1.0);
  if (name == "amplitude_damping") return amplitude_damping(1.0);
  if (name == "paper_qubit") return qubit_generator(1.0, 1.0, 1.0, 1.0, "paper_qubit");
  throw Error(Errc::UnknownPreset, "'" + std::string(name) + "'");
}

Superoperator generator_from_maps(const std::vector<Superoperator>& maps, const std::vector<double>& grid,
                                  std::size_t k) {
  if (maps.size() != grid.size()) throw Error(Errc::SizeMismatch, "one map per grid point is required");
  if (k == 0 || k + 1 >= grid.size())
    throw Error(Errc::BoundaryIndex, "index " + std::to_string(k) + " has no neighbour on both sides");
  const double h1 = grid[k] - grid[k - 1];
  const double h2 = grid[k + 1] - grid[k];
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw Error(Errc::InvalidArgument, "grid must be strictly increasing");
  const ComplexMatrix& lam = maps[k].matrix;
  Eigen::JacobiSVD<ComplexMatrix> svd(lam);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond <= kMapConditionLimit))
    throw Error(Errc::IllConditionedMap, "condition number " + std::to_string(cond) + " at t = " + std::to_string(grid[k]));
  const ComplexMatrix deriv = -h2 / (h1 * (h1 + h2)) * maps[k - 1].matrix + (h2 - h1) / (h1 * h2) * lam +
                              h1 / (h2 * (h1 + h2)) * maps[k + 1].matrix;
  Superoperator out;
  out.dim = maps[k].dim;
  out.matrix = deriv * lam.inverse();
  return out;
}

}  // namespace gkls
