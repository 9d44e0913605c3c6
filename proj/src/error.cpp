#include "gkls/error.hpp"

namespace gkls {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NonSquare: return "NonSquare";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::IterationLimitExceeded: return "IterationLimitExceeded";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownFunction: return "UnknownFunction";
    case Errc::DomainError: return "DomainError";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonHermitianHamiltonian: return "NonHermitianHamiltonian";
    case Errc::NotHermiticityPreserving: return "NotHermiticityPreserving";
    case Errc::NotTracePreserving: return "NotTracePreserving";
    case Errc::NonHermitianKossakowski: return "NonHermitianKossakowski";
    case Errc::TimeDependentNotSupported: return "TimeDependentNotSupported";
    case Errc::BadChannelCount: return "BadChannelCount";
    case Errc::RateEvalError: return "RateEvalError";
    case Errc::EigFailure: return "EigFailure";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::DegenerateZeroMode: return "DegenerateZeroMode";
    case Errc::NearDefective: return "NearDefective";
    case Errc::InvalidState: return "InvalidState";
    case Errc::StepSizeUnderflow: return "StepSizeUnderflow";
    case Errc::TrackingLost: return "TrackingLost";
    case Errc::BoundaryIndex: return "BoundaryIndex";
    case Errc::NonCanonicalGenerator: return "NonCanonicalGenerator";
    case Errc::NegativePopulations: return "NegativePopulations";
    case Errc::NonGenericInitialState: return "NonGenericInitialState";
    case Errc::Unconverged: return "Unconverged";
    case Errc::ZeroRate: return "ZeroRate";
    case Errc::UnknownPreset: return "UnknownPreset";
    case Errc::IllConditionedMap: return "IllConditionedMap";
    case Errc::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case Errc::ColumnSumNonzero: return "ColumnSumNonzero";
    case Errc::NegativeRate: return "NegativeRate";
    case Errc::NonOrthonormalBasis: return "NonOrthonormalBasis";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace gkls
