#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace fewphoton {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

enum class ErrorKind {
  IndexOutOfRange,
  DuplicateLink,
  NonFiniteParameter,
  InvalidParameter,
  InvalidSize,
  UnsupportedPhotonNumber,
  SectorMismatch,
  MissingPositions,
  ModeMismatch,
  UnknownChannel,
  DefectiveMatrix,
  PoleHit,
  NegativeDelay,
  Singular,
  TransmissionNode,
  OffShell,
  ParseError,
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fewphoton
