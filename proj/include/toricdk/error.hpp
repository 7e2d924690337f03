#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace toricdk {

enum class ErrorCode {
  NotFullRank,
  RankMismatch,
  NotContained,
  NotPrincipal,
  BoxTooSmall,
  InvalidSigns,
  NotPrimitive,
  BadRange,
  SupportError,
  NotInCone,
  NotInLattice,
  BadInput,
  ConfigMismatch,
  CrepancyViolation,
  OutOfRange,
  BadStratum,
  EmptyTilting,
  ParseError,
  ValidationError,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotFullRank: return "NotFullRank";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::NotContained: return "NotContained";
    case ErrorCode::NotPrincipal: return "NotPrincipal";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::InvalidSigns: return "InvalidSigns";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::SupportError: return "SupportError";
    case ErrorCode::NotInCone: return "NotInCone";
    case ErrorCode::NotInLattice: return "NotInLattice";
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::CrepancyViolation: return "CrepancyViolation";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BadStratum: return "BadStratum";
    case ErrorCode::EmptyTilting: return "EmptyTilting";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this exception. The
/// optional payload carries diagnostic points (e.g. the antichain of minimal
/// elements for NotPrincipal) rendered as "p/q" strings.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::vector<std::vector<std::string>> payload = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        payload_(std::move(payload)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::vector<std::string>>& payload() const noexcept { return payload_; }

 private:
  ErrorCode code_;
  std::vector<std::vector<std::string>> payload_;
};

}  // namespace toricdk
