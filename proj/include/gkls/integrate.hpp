#pragma once

#include <functional>
#include <vector>

#include "gkls/generator.hpp"
#include "gkls/matcore.hpp"

namespace gkls {

/// The reshaped generator as a function of time, with the Hamiltonian part
/// and each channel's dissipator assembled once.
class ReshapedFlow {
 public:
  explicit ReshapedFlow(const GklsGenerator& g);

  ComplexMatrix at(double t) const;
  int dim() const { return dim_; }
  bool time_dependent() const { return g_.time_dependent; }
  const GklsGenerator& generator() const { return g_; }

 private:
  GklsGenerator g_;
  int dim_;
  ComplexMatrix fixed_;                  // Hamiltonian part plus constant-rate channels
  std::vector<std::size_t> varying_;     // channels whose rate is an expression
  std::vector<ComplexMatrix> dissipators_;
};

using MatrixRhs = std::function<ComplexMatrix(double, const ComplexMatrix&)>;

struct StepControl {
  double tol_per_unit_time = 1e-9;
  int initial_steps = 8;        // per chunk
  double chunk = 1.0;           // length of an accuracy-controlled chunk
  long max_steps_per_chunk = 1L << 22;
};

/// Classical RK4 from t0 to t1 (either direction). Each chunk is integrated
/// with n and 2n steps; the step count doubles until the Richardson estimate
/// |y_2n - y_n| / 15 is within tol * |chunk| * max(1, |y|), and the
/// extrapolated value is kept. Throws Errc::StepSizeUnderflow when the step
/// budget is exhausted.
ComplexMatrix integrate_rk4(const MatrixRhs& f, ComplexMatrix y, double t0, double t1,
                            const StepControl& control = {});

}  // namespace gkls
