#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gausslim {

enum class Errc {
  InvalidArgument,
  GridTooNarrow,
  NonPositiveValues,
  NonPositiveIndex,
  IndexMismatch,
  ValueRangeTooNarrow,
  OutOfRange,
  QuadratureNonconvergence,
  UnsupportedKind,
  NotNormalized,
  NotALevyMeasure,
  VanishingTrace,
  FamilyTooShort,
  FiniteSecondMoment,
  NotInDomain,
  InfiniteIntensity,
  DivergentMoment,
  TooFewSamples,
  ZeroMatrix,
  ConfigInvalid,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Library error; `code()` names the failure class, `what()` carries detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gausslim
