#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace insulation {

enum class ErrorKind {
  // configuration
  SchemaError,
  UnknownLabel,
  // geometry
  InvalidDomain,
  InvalidDistribution,
  TransversalityFailure,
  ModeInvalid,
  NonInjectiveLayer,
  MeshFailure,
  DegenerateFiber,
  // solver
  NonpositiveWeight,
  NoConvergence,
  MeshMismatch,
  ZeroTrace,
  Io,
};

enum class ErrorClass { Config = 1, Geometry = 2, Solver = 3 };

constexpr ErrorClass error_class(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SchemaError:
    case ErrorKind::UnknownLabel:
      return ErrorClass::Config;
    case ErrorKind::InvalidDomain:
    case ErrorKind::InvalidDistribution:
    case ErrorKind::TransversalityFailure:
    case ErrorKind::ModeInvalid:
    case ErrorKind::NonInjectiveLayer:
    case ErrorKind::MeshFailure:
    case ErrorKind::DegenerateFiber:
      return ErrorClass::Geometry;
    default:
      return ErrorClass::Solver;
  }
}

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above; the
/// CLI maps the kind's class onto its exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorClass category() const noexcept { return error_class(kind_); }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::TransversalityFailure: return "TransversalityFailure";
    case ErrorKind::ModeInvalid: return "ModeInvalid";
    case ErrorKind::NonInjectiveLayer: return "NonInjectiveLayer";
    case ErrorKind::MeshFailure: return "MeshFailure";
    case ErrorKind::DegenerateFiber: return "DegenerateFiber";
    case ErrorKind::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MeshMismatch: return "MeshMismatch";
    case ErrorKind::ZeroTrace: return "ZeroTrace";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace insulation
