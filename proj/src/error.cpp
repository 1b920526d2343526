#include "fbasis/error.hpp"

namespace fbasis {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NotOrthonormal: return "NotOrthonormal";
    case ErrorKind::NotRotation: return "NotRotation";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::LogUndefined: return "LogUndefined";
    case ErrorKind::CutLocus: return "CutLocus";
    case ErrorKind::BaseMismatch: return "BaseMismatch";
    case ErrorKind::CutLocusEncountered: return "CutLocusEncountered";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EigengapDegenerate: return "EigengapDegenerate";
    case ErrorKind::ZeroJacobian: return "ZeroJacobian";
    case ErrorKind::InsufficientRank: return "InsufficientRank";
    case ErrorKind::DegenerateLocalVariation: return "DegenerateLocalVariation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Format: return "Format";
    case ErrorKind::Manifest: return "Manifest";
  }
  return "Unknown";
}

static std::string decorate(ErrorKind kind, const std::string& message,
                            std::optional<std::size_t> sample) {
  std::string out = std::string(to_string(kind)) + ": " + message;
  if (sample) out += " (sample " + std::to_string(*sample) + ")";
  return out;
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> sample_index)
    : std::runtime_error(decorate(kind, message, sample_index)),
      kind_(kind),
      message_(message),
      sample_(sample_index) {}

}  // namespace fbasis
