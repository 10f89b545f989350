#include "helmdual/error.hpp"

namespace helmdual {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ShellResonance: return "ShellResonance";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NotInUPlus: return "NotInUPlus";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::MaxIters: return "MaxIters";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::NoSolutionFound: return "NoSolutionFound";
    case ErrorKind::SupportOverflow: return "SupportOverflow";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::InterpolationDegenerate: return "InterpolationDegenerate";
    case ErrorKind::InsufficientShells: return "InsufficientShells";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::MissingRequired: return "MissingRequired";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::TruncatedPayload: return "TruncatedPayload";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace helmdual
