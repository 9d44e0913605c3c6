#include "gkls/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gkls/spectra.hpp"

namespace gkls {

namespace {

// Least-squares slope of y against x over [first, x.size()).
double slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t first) {
  const std::size_t n = x.size() - first;
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = first; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = first; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

struct Windows {
  std::size_t full, half, quarter;
};

Windows window_starts(const std::vector<double>& times, double burn_in, double horizon) {
  auto first_at = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t - 1e-12 * horizon) - times.begin());
  };
  const double rest = horizon - burn_in;
  return {first_at(burn_in), first_at(burn_in + 0.5 * rest), first_at(burn_in + 0.75 * rest)};
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < 1e-12 ? 0.0 : std::abs(a - b) / scale;
}

double vector_norm(const RealVector& p, NormKind kind) {
  switch (kind) {
    case NormKind::one: return p.cwiseAbs().sum();
    case NormKind::inf: return p.cwiseAbs().maxCoeff();
    case NormKind::two:
    case NormKind::frobenius: return p.norm();
  }
  return p.norm();
}

// Largest log-growth rate of the flow x' = -L x over one unit of time.
double growth_bound(const ComplexMatrix& l) { return std::max(0.0, log_norm(ComplexMatrix(-l), NormKind::two)); }

double choose_interval(double requested, double rate_sum, double growth, double horizon) {
  double dt = requested > 0.0 ? requested : (rate_sum > 0.0 ? 0.5 / rate_sum : horizon);
  if (growth > 0.0) dt = std::min(dt, 10.0 / growth);
  return std::min(dt, horizon / 256.0);
}

void finish(LyapunovEstimate& est, const LyapunovOptions& options, const char* what) {
  est.converged = est.convergence_gap <= kConvergenceLimit;
  if (!est.converged && options.throw_on_unconverged)
    throw UnconvergedError(est, std::string(what) + ": convergence gap " + std::to_string(est.convergence_gap) +
                                    " after horizon " + std::to_string(est.horizon));
}

}  // namespace

double canonical_rate_sum(const GklsGenerator& g, double t) { return canonical_form(g, t).gamma_sum; }

LyapunovEstimate max_exponent_backward(const GklsGenerator& g, const ComplexMatrix& rho0, double horizon,
                                       double renorm_interval, const LyapunovOptions& options) {
  if (g.time_dependent)
    throw Error(Errc::TimeDependentNotSupported, "backward exponent needs a time-autonomous generator");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(Errc::InvalidArgument, "horizon must be positive");
  if (rho0.rows() != g.dim || rho0.cols() != g.dim) throw Error(Errc::DimensionMismatch, "state has the wrong shape");
  if ((rho0 - rho0.adjoint()).norm() > 1e-10 || std::abs(rho0.trace() - 1.0) > 1e-10)
    throw Error(Errc::InvalidState, "initial state must be Hermitian with unit trace");

  const Superoperator s = reshape(g);
  const RelaxationSpectrum spec = relaxation_spectrum(s);
  const double gmax = spec.rates.back();
  const double tol = 1e-8 * std::max(1.0, gmax);
  double overlap = 0.0;
  for (std::size_t l = 0; l < spec.rates.size(); ++l)
    if (gmax - spec.rates[l] <= tol)
      overlap = std::max(overlap, std::abs(hs_inner(spec.left_ops[l], rho0)) * spec.right_ops[l].norm());
  if (overlap <= kGenericOverlap)
    throw Error(Errc::NonGenericInitialState, "overlap with the dominant mode is " + std::to_string(overlap));

  const double dt = choose_interval(renorm_interval, canonical_rate_sum(g, 0.0), growth_bound(s.matrix), horizon);
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  const double h = horizon / static_cast<double>(steps);
  const ComplexMatrix back = expm(-h * s.matrix);

  LyapunovEstimate est;
  est.horizon = horizon;
  est.burn_in = kBurnInFraction * horizon;

  auto populations = [&](const ComplexVector& v) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(unvec(v, g.dim)), Eigen::EigenvaluesOnly);
    return RealVector(es.eigenvalues());
  };

  ComplexVector v = vec(rho0);
  const double n0 = vector_norm(populations(v), options.norm);
  v /= n0;
  std::vector<double> times{0.0}, logs{0.0};
  double total = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    v = back * v;
    const double n = vector_norm(populations(v), options.norm);
    if (!(n > 0.0) || !std::isfinite(n))
      throw Error(Errc::InvalidState, "population norm degenerated at t = -" + std::to_string(k * h));
    v /= n;
    const double step_log = std::log(n);
    total += step_log;
    const double tau = static_cast<double>(k) * h;
    times.push_back(tau);
    logs.push_back(total);
    est.windows.push_back({tau - h, step_log / h, total / tau});
  }

  const Windows w = window_starts(times, est.burn_in, horizon);
  const double full = slope(times, logs, w.full);
  const double half = slope(times, logs, w.half);
  const double quarter = slope(times, logs, w.quarter);
  est.chi = std::max({full, half, quarter});
  est.convergence_gap = relative_gap(half, quarter);
  finish(est, options, "backward exponent");
  return est;
}

LyapunovEstimate qr_spectrum(const GklsGenerator& g, double horizon, double reortho_interval,
                             const LyapunovOptions& options) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(Errc::InvalidArgument, "horizon must be positive");
  const ReshapedFlow flow(g);
  const Eigen::Index n = static_cast<Eigen::Index>(g.dim) * g.dim;

  double growth = 0.0, rate_sum = 0.0;
  const int probes = g.time_dependent ? 33 : 1;
  for (int p = 0; p < probes; ++p) {
    const double t = probes == 1 ? 0.0 : horizon * p / (probes - 1);
    growth = std::max(growth, growth_bound(flow.at(t)));
    rate_sum = std::max(rate_sum, std::abs(canonical_rate_sum(g, t)));
  }
  const double dt = choose_interval(reortho_interval, rate_sum, growth, horizon);
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  const double h = horizon / static_cast<double>(steps);

  ComplexMatrix step_map;
  if (!g.time_dependent) step_map = expm(-h * flow.at(0.0));
  const MatrixRhs rhs = [&flow](double t, const ComplexMatrix& y) -> ComplexMatrix { return -(flow.at(t) * y); };

  LyapunovEstimate est;
  est.horizon = horizon;
  est.burn_in = kBurnInFraction * horizon;

  ComplexMatrix q = ComplexMatrix::Identity(n, n);
  std::vector<double> times{0.0};
  std::vector<std::vector<double>> logs(static_cast<std::size_t>(n), std::vector<double>{0.0});
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t0 = static_cast<double>(k - 1) * h;
    const double t1 = static_cast<double>(k) * h;
    ComplexMatrix y = g.time_dependent ? integrate_rk4(rhs, q, t0, t1, options.step) : ComplexMatrix(step_map * q);
    QrResult f;
    try {
      f = qr(y);
    } catch (const Error& e) {
      if (e.code() == Errc::RankDeficient)
        throw Error(Errc::RankDeficient, "flow collapsed at t = " + std::to_string(t1) + " (" + e.what() + ")");
      throw;
    }
    q = std::move(f.q);
    times.push_back(t1);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& li = logs[static_cast<std::size_t>(i)];
      li.push_back(li.back() + std::log(f.r(i, i).real()));
    }
    const double lead = logs[0].back();
    est.windows.push_back({t0, (lead - logs[0][logs[0].size() - 2]) / h, lead / t1});
  }

  const Windows w = window_starts(times, est.burn_in, horizon);
  std::vector<double> full, half, quarter;
  for (const auto& li : logs) {
    full.push_back(slope(times, li, w.full));
    half.push_back(slope(times, li, w.half));
    quarter.push_back(slope(times, li, w.quarter));
  }
  std::sort(full.begin(), full.end());
  std::sort(half.begin(), half.end());
  std::sort(quarter.begin(), quarter.end());

  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    scale = std::max({scale, std::abs(half[i]), std::abs(quarter[i])});
    diff = std::max(diff, std::abs(half[i] - quarter[i]));
  }
  est.spectrum = full;
  est.chi = std::max({full.back(), half.back(), quarter.back()});
  est.convergence_gap = scale < 1e-12 ? 0.0 : diff / scale;
  finish(est, options, "QR spectrum");
  return est;
}

DivisibilityReport divisibility_bounds(const GklsGenerator& g, double horizon, double reortho_interval,
                                       const LyapunovOptions& options) {
  DivisibilityReport rep;
  rep.estimate = qr_spectrum(g, horizon, reortho_interval, options);
  const auto& chi = *rep.estimate.spectrum;
  const double d = g.dim;
  rep.lhs = chi.back();
  rep.rhs_cp = std::accumulate(chi.begin(), chi.end(), 0.0) / d;

  const int samples = g.time_dependent ? 513 : 1;
  double integral = 0.0, prev = 0.0;
  for (int p = 0; p < samples; ++p) {
    const double t = samples == 1 ? 0.0 : horizon * p / (samples - 1);
    const CanonicalForm cf = canonical_form(g, t);
    double c = 0.0;
    for (std::size_t k = 0; k < cf.channels().size(); ++k) c += std::abs(cf.gamma(k)) - cf.gamma(k);
    c /= d;
    rep.correction_sup = std::max(rep.correction_sup, c);
    if (p > 0) integral += 0.5 * (c + prev) * horizon / (samples - 1);
    prev = c;
  }
  rep.correction_mean = samples == 1 ? prev : integral / horizon;

  const double tol = 1e-8 * std::max(1.0, std::abs(rep.lhs)) + rep.estimate.convergence_gap * std::abs(rep.lhs);
  rep.cp_bound_holds = rep.lhs <= rep.rhs_cp + tol;
  rep.corrected_bound_holds = rep.lhs <= rep.rhs_cp + rep.correction_sup + tol;
  return rep;
}

}  // namespace gkls
