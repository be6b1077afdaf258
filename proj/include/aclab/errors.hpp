#pragma once

#include <stdexcept>
#include <string>

namespace aclab {

enum class ErrorKind {
  NoZeroCrossing,
  NonConvergent,
  QuadratureFailure,
  IndefiniteAssembly,
  NotConverged,
  ComplexRoots,
  NoMatch,
  EmptyBoundary,
  RadiusOutOfDomain,
  TooCoarse,
  ZeroDenominator,
  OrderingViolation,
  InsufficientPairs,
  EmptyAnnulus,
  MissingKey,
  SchemaMismatch,
  InvalidConfig,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NoZeroCrossing: return "NoZeroCrossing";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::IndefiniteAssembly: return "IndefiniteAssembly";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::ComplexRoots: return "ComplexRoots";
    case ErrorKind::NoMatch: return "NoMatch";
    case ErrorKind::EmptyBoundary: return "EmptyBoundary";
    case ErrorKind::RadiusOutOfDomain: return "RadiusOutOfDomain";
    case ErrorKind::TooCoarse: return "TooCoarse";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::OrderingViolation: return "OrderingViolation";
    case ErrorKind::InsufficientPairs: return "InsufficientPairs";
    case ErrorKind::EmptyAnnulus: return "EmptyAnnulus";
    case ErrorKind::MissingKey: return "MissingKey";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

}  // namespace aclab
