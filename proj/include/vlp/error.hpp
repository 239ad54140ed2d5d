#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vlp {

enum class ErrorCode {
  CoincidentProjection,
  UnequalBeaconHeights,
  SingularGeometry,
  DegenerateCircle,
  InsufficientTracks,
  MissingDiagnostics,
  EmptyInput,
  LengthMismatch,
  BeaconBehindCamera,
  UnknownBeacon,
  InvalidInput,
  ConfigParse,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::CoincidentProjection: return "CoincidentProjection";
    case ErrorCode::UnequalBeaconHeights: return "UnequalBeaconHeights";
    case ErrorCode::SingularGeometry: return "SingularGeometry";
    case ErrorCode::DegenerateCircle: return "DegenerateCircle";
    case ErrorCode::InsufficientTracks: return "InsufficientTracks";
    case ErrorCode::MissingDiagnostics: return "MissingDiagnostics";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BeaconBehindCamera: return "BeaconBehindCamera";
    case ErrorCode::UnknownBeacon: return "UnknownBeacon";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can flag rows without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vlp
