#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace svdc {

enum class ErrorCode : std::uint8_t {
  NonFiniteInput,
  NoConvergence,
  RankOutOfRange,
  DimensionMismatch,
  ZeroPeak,
  ZeroEnergy,
  ImageTooSmall,
  OutOfRange,
  BadMagic,
  UnsupportedVersion,
  CorruptContainer,
  BadSignature,
  MaxvalUnsupported,
  TruncatedPixelData,
  MalformedHeader,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` is stable; `what()` is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
        code_(code) {}
  explicit Error(ErrorCode code) : Error(code, "") {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Jacobi sweeps exhausted before the columns became orthogonal.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(int sweeps, double residual)
      : Error(ErrorCode::NoConvergence,
              "after " + std::to_string(sweeps) + " sweeps, residual " + std::to_string(residual)),
        sweeps_(sweeps),
        residual_(residual) {}

  int sweeps() const noexcept { return sweeps_; }
  /// Largest |a_i . a_j| / (|a_i| |a_j|) seen in the final sweep.
  double residual() const noexcept { return residual_; }

 private:
  int sweeps_;
  double residual_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFiniteInput: return "non-finite input";
    case ErrorCode::NoConvergence: return "no convergence";
    case ErrorCode::RankOutOfRange: return "rank out of range";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::ZeroPeak: return "zero peak";
    case ErrorCode::ZeroEnergy: return "zero energy";
    case ErrorCode::ImageTooSmall: return "image too small";
    case ErrorCode::OutOfRange: return "out of range";
    case ErrorCode::BadMagic: return "bad magic";
    case ErrorCode::UnsupportedVersion: return "unsupported version";
    case ErrorCode::CorruptContainer: return "corrupt container";
    case ErrorCode::BadSignature: return "bad signature";
    case ErrorCode::MaxvalUnsupported: return "maxval unsupported";
    case ErrorCode::TruncatedPixelData: return "truncated pixel data";
    case ErrorCode::MalformedHeader: return "malformed header";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace svdc
