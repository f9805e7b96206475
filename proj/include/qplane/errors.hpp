#pragma once
#include <stdexcept>
#include <string>

namespace qplane {

// Error taxonomy shared across the library.  Everything derives from
// qplane::Error so callers can catch the whole family at the CLI boundary.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string &msg) : Error("domain: " + msg) {}
};

// An operator or pairing ran out of lattice window (shift consumed an edge).
class WindowError : public Error {
public:
  explicit WindowError(const std::string &msg) : Error("window: " + msg) {}
};

// zero-limit extrapolation did not converge.
class ExtrapolationError : public Error {
public:
  explicit ExtrapolationError(const std::string &msg)
      : Error("extrapolation: " + msg) {}
};

// Series cancellation exceeded the available precision budget.
class PrecisionError : public Error {
public:
  explicit PrecisionError(const std::string &msg)
      : Error("precision: " + msg) {}
};

// A weighted sum shows a growing tail (membership condition violated).
class DivergenceError : public Error {
public:
  explicit DivergenceError(const std::string &msg)
      : Error("divergence: " + msg) {}
};

class CalibrationError : public Error {
public:
  explicit CalibrationError(const std::string &msg)
      : Error("calibration: " + msg) {}
};

// Spectral weight sits at the window edge and cannot be resolved.
class ResolutionError : public Error {
public:
  explicit ResolutionError(const std::string &msg)
      : Error("resolution: " + msg) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string &msg) : Error("config: " + msg) {}
};

} // namespace qplane
