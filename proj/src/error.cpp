#include "setval/error.hpp"

namespace setval {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::NotInterval: return "NotInterval";
    case ErrorKind::NotAdapted: return "NotAdapted";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NotMartingale: return "NotMartingale";
    case ErrorKind::NotRepresentable: return "NotRepresentable";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::UnknownExperiment: return "UnknownExperiment";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace setval
