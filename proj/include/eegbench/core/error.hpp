#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eegbench {

enum class ErrorCode {
  InvalidInput,
  NotPositiveDefinite,
  DimensionMismatch,
  NonConvergence,
  InvalidBand,
  SignalTooShort,
  EmptyEpochs,
  UnsupportedRatio,
  InvalidEmbedding,
  DegenerateLabels,
  InvalidHyper,
  SingularCovariance,
  StratificationImpossible,
  InsufficientUnits,
  GridExhausted,
  UndefinedMetric,
  IncompleteGrid,
  EffectUndefined,
  NotFound,
  CorruptBundle,
  UnsupportedVersion,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::EmptyEpochs: return "EmptyEpochs";
    case ErrorCode::UnsupportedRatio: return "UnsupportedRatio";
    case ErrorCode::InvalidEmbedding: return "InvalidEmbedding";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::InvalidHyper: return "InvalidHyper";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::StratificationImpossible: return "StratificationImpossible";
    case ErrorCode::InsufficientUnits: return "InsufficientUnits";
    case ErrorCode::GridExhausted: return "GridExhausted";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::IncompleteGrid: return "IncompleteGrid";
    case ErrorCode::EffectUndefined: return "EffectUndefined";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::CorruptBundle: return "CorruptBundle";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the benchmark runner in particular) can record and continue.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace eegbench
