#pragma once

#include <stdexcept>
#include <string>

namespace depthgate {

enum class ErrorKind {
  grid_mismatch,
  dimension_mismatch,
  kind_mismatch,
  empty_sample,
  non_finite,
  invalid_grid,
  invalid_sample,
  invalid_argument,
  parse,
  unsupported,
  size_cap,
  degenerate,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::kind_mismatch: return "kind-mismatch";
    case ErrorKind::empty_sample: return "empty-sample";
    case ErrorKind::non_finite: return "non-finite";
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::invalid_sample: return "invalid-sample";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::parse: return "parse";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::size_cap: return "size-cap";
    case ErrorKind::degenerate: return "degenerate";
  }
  return "unknown";
}

/// Base of every exception thrown by the library. Carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed or incompatible input data (files, samples, grids).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A depth or test could not be evaluated on otherwise valid data.
class ComputeError : public Error {
 public:
  using Error::Error;
};

}  // namespace depthgate
