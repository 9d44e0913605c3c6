#include "gkls/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gkls/error.hpp"

namespace gkls {

double bound_tolerance(double gamma_max) { return kBoundTol * std::max(1.0, gamma_max); }

RelaxationSpectrum relaxation_spectrum(const GklsGenerator& g) {
  if (g.time_dependent)
    throw Error(Errc::TimeDependentNotSupported, "relaxation_spectrum needs a time-autonomous generator");
  return relaxation_spectrum(reshape(g));
}

RelaxationSpectrum relaxation_spectrum(const Superoperator& s) {
  const int d = s.dim;
  EigResult e;
  try {
    e = eig(s.matrix);
  } catch (const Error& err) {
    if (err.code() == Errc::IterationLimitExceeded) throw Error(Errc::EigFailure, err.what());
    throw;
  }
  const auto n = e.values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Complex la = e.values[a], lb = e.values[b];
    if (la.real() != lb.real()) return la.real() > lb.real();
    return la.imag() < lb.imag();
  });

  RelaxationSpectrum out;
  out.dim = d;
  out.vector_condition = e.vector_condition;
  out.diagonalizable = !e.near_defective();
  for (const auto k : order) {
    const auto col = static_cast<Eigen::Index>(k);
    out.eigenvalues.push_back(e.values[k]);
    out.rates.push_back(-e.values[k].real());
    out.right_ops.push_back(unvec(e.right_vectors.col(col), d));
    out.left_ops.push_back(unvec(e.left_vectors.col(col), d));
  }
  return out;
}

BoundReport check_bound(const RelaxationSpectrum& spec, int d) { return check_bound(spec.rates, d); }

BoundReport check_bound(std::vector<double> rates, int d) {
  const auto expected = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
  if (d < 1 || rates.size() != expected)
    throw Error(Errc::SizeMismatch, "expected " + std::to_string(expected) + " rates, got " + std::to_string(rates.size()));
  std::sort(rates.begin(), rates.end());
  BoundReport r;
  r.gamma_max = rates.back();
  r.total_over_d = std::accumulate(rates.begin() + 1, rates.end(), 0.0) / d;
  r.margin = r.total_over_d - r.gamma_max;
  const double tol = bound_tolerance(r.gamma_max);
  r.satisfied = r.margin >= -tol;
  r.saturated = std::abs(r.margin) <= tol;
  return r;
}

QubitRates qubit_rates(double g_plus, double g_minus, double g_z) {
  const double l = g_plus + g_minus;
  return {l, 0.5 * l + g_z};
}

ComplexMatrix stationary_state(const RelaxationSpectrum& spec) {
  if (spec.rates.empty()) throw Error(Errc::SizeMismatch, "empty spectrum");
  const double tol = bound_tolerance(spec.rates.back());
  const auto zeros = std::count_if(spec.rates.begin(), spec.rates.end(), [&](double r) { return std::abs(r) <= tol; });
  if (zeros != 1) throw Error(Errc::DegenerateZeroMode, std::to_string(zeros) + " zero modes");
  const ComplexMatrix& x = spec.right_ops.front();
  const Complex tr = x.trace();
  if (std::abs(tr) == 0.0) throw Error(Errc::DegenerateZeroMode, "zero mode has vanishing trace");
  return hermitian_part(x / tr);
}

std::vector<double> bw_rate_identity(const CanonicalForm& g, const RelaxationSpectrum& spec) {
  if (!spec.diagonalizable)
    throw Error(Errc::NearDefective, "eigenvector condition " + std::to_string(spec.vector_condition));
  ComplexMatrix rho;
  try {
    rho = stationary_state(spec);
  } catch (const Error& e) {
    // A unital generator keeps I/d fixed even when the zero mode is degenerate.
    const int d = spec.dim;
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    if (e.code() != Errc::DegenerateZeroMode || apply(g.base, id).norm() > 1e-12 * std::max(1.0, g.gamma_sum)) throw;
    rho = id / static_cast<double>(d);
  }
  auto ss_norm2 = [&](const ComplexMatrix& y) { return (rho * y.adjoint() * y).trace().real(); };

  std::vector<double> out;
  for (std::size_t l = 1; l < spec.rates.size(); ++l) {
    ComplexMatrix y = spec.left_ops[l];
    y /= y.norm();
    const double denom = ss_norm2(y);
    // Modes invisible to the stationary state carry no information here.
    if (!(denom > 1e-14)) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    double num = 0.0;
    for (std::size_t k = 0; k < g.channels().size(); ++k) num += g.gamma(k) * ss_norm2(commutator(g.channels()[k].op, y));
    out.push_back(std::abs(num / (2.0 * denom) - spec.rates[l]));
  }
  return out;
}

double log_norm(const ComplexMatrix& a, NormKind kind) {
  require_square(a, "log_norm input");
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  switch (kind) {
    case NormKind::one: {
      double best = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        double s = a(j, j).real();
        for (Eigen::Index i = 0; i < n; ++i)
          if (i != j) s += std::abs(a(i, j));
        best = std::max(best, s);
      }
      return best;
    }
    case NormKind::inf: {
      double best = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) {
        double s = a(i, i).real();
        for (Eigen::Index j = 0; j < n; ++j)
          if (i != j) s += std::abs(a(i, j));
        best = std::max(best, s);
      }
      return best;
    }
    case NormKind::two: {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
      return es.eigenvalues()(n - 1);
    }
    case NormKind::frobenius:
      break;
  }
  throw Error(Errc::InvalidArgument, "log_norm is defined for the one, two and inf norms");
}

double log_norm(const RealMatrix& a, NormKind kind) { return log_norm(ComplexMatrix(a.cast<Complex>()), kind); }

}  // namespace gkls
