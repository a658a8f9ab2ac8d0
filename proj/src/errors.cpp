#include "gausslim/errors.hpp"

namespace gausslim {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "invalid-argument";
    case Errc::GridTooNarrow: return "grid-too-narrow";
    case Errc::NonPositiveValues: return "non-positive-values";
    case Errc::NonPositiveIndex: return "nonpositive-index";
    case Errc::IndexMismatch: return "index-mismatch";
    case Errc::ValueRangeTooNarrow: return "value-range-too-narrow";
    case Errc::OutOfRange: return "out-of-range";
    case Errc::QuadratureNonconvergence: return "quadrature-nonconvergence";
    case Errc::UnsupportedKind: return "unsupported-kind";
    case Errc::NotNormalized: return "not-normalized";
    case Errc::NotALevyMeasure: return "not-a-levy-measure";
    case Errc::VanishingTrace: return "vanishing-trace";
    case Errc::FamilyTooShort: return "family-too-short";
    case Errc::FiniteSecondMoment: return "finite-second-moment";
    case Errc::NotInDomain: return "not-in-domain";
    case Errc::InfiniteIntensity: return "infinite-intensity";
    case Errc::DivergentMoment: return "divergent-moment";
    case Errc::TooFewSamples: return "too-few-samples";
    case Errc::ZeroMatrix: return "zero-matrix";
    case Errc::ConfigInvalid: return "config-invalid";
    case Errc::Io: return "io";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace gausslim
