#include "fewphoton/types.hpp"

namespace fewphoton {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DuplicateLink: return "DuplicateLink";
    case ErrorKind::NonFiniteParameter: return "NonFiniteParameter";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::InvalidSize: return "InvalidSize";
    case ErrorKind::UnsupportedPhotonNumber: return "UnsupportedPhotonNumber";
    case ErrorKind::SectorMismatch: return "SectorMismatch";
    case ErrorKind::MissingPositions: return "MissingPositions";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::UnknownChannel: return "UnknownChannel";
    case ErrorKind::DefectiveMatrix: return "DefectiveMatrix";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::NegativeDelay: return "NegativeDelay";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::TransmissionNode: return "TransmissionNode";
    case ErrorKind::OffShell: return "OffShell";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace fewphoton
