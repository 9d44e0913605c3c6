#include "gkls/integrate.hpp"

#include <cmath>

#include "gkls/error.hpp"

namespace gkls {

using namespace std::complex_literals;

ReshapedFlow::ReshapedFlow(const GklsGenerator& g) : g_(g), dim_(g.dim) {
  const ComplexMatrix id = ComplexMatrix::Identity(dim_, dim_);
  fixed_ = -1.0i * kron(g.hamiltonian, id) + 1.0i * kron(id, g.hamiltonian.transpose());
  for (std::size_t k = 0; k < g.channels.size(); ++k) {
    const auto& l = g.channels[k].op;
    const ComplexMatrix ldl = l.adjoint() * l;
    ComplexMatrix dk = kron(l, l.conjugate()) - 0.5 * (kron(ldl, id) + kron(id, ldl.transpose()));
    if (const auto* v = std::get_if<double>(&g.channels[k].rate)) {
      fixed_ += *v * dk;
    } else {
      varying_.push_back(k);
      dissipators_.push_back(std::move(dk));
    }
  }
}

ComplexMatrix ReshapedFlow::at(double t) const {
  ComplexMatrix out = fixed_;
  for (std::size_t i = 0; i < varying_.size(); ++i) out += g_.rate_at(varying_[i], t) * dissipators_[i];
  return out;
}

namespace {

ComplexMatrix rk4_run(const MatrixRhs& f, ComplexMatrix y, double t0, double h, long n) {
  double t = t0;
  for (long s = 0; s < n; ++s) {
    const ComplexMatrix k1 = f(t, y);
    const ComplexMatrix k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const ComplexMatrix k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const ComplexMatrix k4 = f(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + static_cast<double>(s + 1) * h;
  }
  return y;
}

}  // namespace

ComplexMatrix integrate_rk4(const MatrixRhs& f, ComplexMatrix y, double t0, double t1, const StepControl& control) {
  const double span = t1 - t0;
  if (span == 0.0) return y;
  const auto chunks = static_cast<long>(std::ceil(std::abs(span) / control.chunk - 1e-12));
  const double chunk = span / static_cast<double>(std::max(1L, chunks));
  long n = std::max(1, control.initial_steps);
  for (long c = 0; c < std::max(1L, chunks); ++c) {
    const double a = t0 + static_cast<double>(c) * chunk;
    for (;;) {
      const ComplexMatrix coarse = rk4_run(f, y, a, chunk / static_cast<double>(n), n);
      const ComplexMatrix fine = rk4_run(f, y, a, chunk / static_cast<double>(2 * n), 2 * n);
      if (!fine.allFinite())
        throw Error(Errc::StepSizeUnderflow, "solution is no longer finite at t = " + std::to_string(a));
      const double err = (fine - coarse).norm() / 15.0;
      const double allowed = control.tol_per_unit_time * std::abs(chunk) * std::max(1.0, fine.norm());
      if (err <= allowed) {
        y = fine + (fine - coarse) / 15.0;
        // Let the step count relax again when the chunk was easy.
        if (err < allowed / 64.0 && n > 1) n /= 2;
        break;
      }
      n *= 2;
      if (2 * n > control.max_steps_per_chunk)
        throw Error(Errc::StepSizeUnderflow,
                    "accuracy " + std::to_string(control.tol_per_unit_time) + " unreachable near t = " + std::to_string(a));
    }
  }
  return y;
}

}  // namespace gkls
