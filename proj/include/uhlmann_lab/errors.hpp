#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uhl {

enum class ErrorCode {
  SingularEigenvector,
  NonpositiveTemperature,
  DegenerateDensity,
  StepCountTooSmall,
  CurveNotClosed,
  OriginOnCurve,
  NoTransitionFound,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularEigenvector: return "SingularEigenvector";
    case ErrorCode::NonpositiveTemperature: return "NonpositiveTemperature";
    case ErrorCode::DegenerateDensity: return "DegenerateDensity";
    case ErrorCode::StepCountTooSmall: return "StepCountTooSmall";
    case ErrorCode::CurveNotClosed: return "CurveNotClosed";
    case ErrorCode::OriginOnCurve: return "OriginOnCurve";
    case ErrorCode::NoTransitionFound: return "NoTransitionFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require_positive_temperature(double T) {
  if (!(T > 0.0)) throw Error(ErrorCode::NonpositiveTemperature, "T must be > 0, got " + std::to_string(T));
}

}  // namespace uhl
