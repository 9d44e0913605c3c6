#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gkls {

enum class Errc {
  // matcore
  NonSquare,
  ShapeMismatch,
  IterationLimitExceeded,
  RankDeficient,
  // ratelang
  SyntaxError,
  UnknownFunction,
  DomainError,
  // generator
  DimensionMismatch,
  NonHermitianHamiltonian,
  NotHermiticityPreserving,
  NotTracePreserving,
  NonHermitianKossakowski,
  TimeDependentNotSupported,
  BadChannelCount,
  RateEvalError,
  // spectra
  EigFailure,
  SizeMismatch,
  DegenerateZeroMode,
  NearDefective,
  // pauli
  InvalidState,
  StepSizeUnderflow,
  TrackingLost,
  BoundaryIndex,
  NonCanonicalGenerator,
  NegativePopulations,
  // lyapunov
  NonGenericInitialState,
  Unconverged,
  // witness
  ZeroRate,
  UnknownPreset,
  IllConditionedMap,
  // classical
  NegativeOffDiagonal,
  ColumnSumNonzero,
  NegativeRate,
  NonOrthonormalBasis,
  // cli / io
  FileNotFound,
  SchemaError,
  ValidationError,
  InvalidArgument,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gkls
