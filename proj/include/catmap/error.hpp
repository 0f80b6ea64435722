#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace catmap {

enum class Errc {
  NotUnimodular,
  NotHyperbolic,
  NotQuantizable,
  FactorizationTimeout,
  ValueTooLarge,
  NotAMultiple,
  NotPrime,
  BudgetExceeded,
  EtaOutOfRange,
  DegenerateK,
  ZeroVector,
  InvalidArgument,
  ConstructionFailed,
  NotUnitary,
  NoScalarPower,
  NonIntegralMultiplicity,
  NotNormalized,
  IoError,
  SchemaMismatch,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::NotUnimodular: return "NotUnimodular";
    case Errc::NotHyperbolic: return "NotHyperbolic";
    case Errc::NotQuantizable: return "NotQuantizable";
    case Errc::FactorizationTimeout: return "FactorizationTimeout";
    case Errc::ValueTooLarge: return "ValueTooLarge";
    case Errc::NotAMultiple: return "NotAMultiple";
    case Errc::NotPrime: return "NotPrime";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::EtaOutOfRange: return "EtaOutOfRange";
    case Errc::DegenerateK: return "DegenerateK";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ConstructionFailed: return "ConstructionFailed";
    case Errc::NotUnitary: return "NotUnitary";
    case Errc::NoScalarPower: return "NoScalarPower";
    case Errc::NonIntegralMultiplicity: return "NonIntegralMultiplicity";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::IoError: return "IoError";
    case Errc::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

/// Every failure raised by the library. `what()` starts with the error name.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace catmap
