#pragma once

#include <stdexcept>
#include <string>

namespace wirewall {

enum class ErrorKind {
  invalid_geometry,
  accuracy,
  truncation,
  domain,
  capacity,
  alignment,
  singularity,
  config,
  io,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_geometry: return "invalid-geometry";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::domain: return "domain";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// User errors are caused by inputs; everything else is an internal failure.
  bool is_user_error() const noexcept {
    return kind_ == ErrorKind::invalid_geometry || kind_ == ErrorKind::domain ||
           kind_ == ErrorKind::capacity || kind_ == ErrorKind::config ||
           kind_ == ErrorKind::truncation || kind_ == ErrorKind::io;
  }

 private:
  ErrorKind kind_;
};

/// Thrown by geometry constructors; carries the name of the offending parameter.
class InvalidGeometry : public Error {
 public:
  InvalidGeometry(std::string param, const std::string& what)
      : Error(ErrorKind::invalid_geometry, "parameter `" + param + "`: " + what),
        param_(std::move(param)) {}

  const std::string& parameter() const noexcept { return param_; }

 private:
  std::string param_;
};

/// Quadrature did not reach the requested tolerance; both estimates are kept.
class AccuracyError : public Error {
 public:
  AccuracyError(double fine, double coarse, double tolerance)
      : Error(ErrorKind::accuracy,
              "estimates " + std::to_string(fine) + " and " + std::to_string(coarse) +
                  " differ by more than " + std::to_string(tolerance)),
        fine_(fine),
        coarse_(coarse) {}

  double fine() const noexcept { return fine_; }
  double coarse() const noexcept { return coarse_; }

 private:
  double fine_;
  double coarse_;
};

}  // namespace wirewall
