#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace fbasis {

enum class ErrorKind {
  DimensionMismatch,
  RankDeficient,
  NotOrthonormal,
  NotRotation,
  NonFinite,
  Singular,
  LogUndefined,
  CutLocus,
  BaseMismatch,
  CutLocusEncountered,
  EmptyInput,
  EigengapDegenerate,
  ZeroJacobian,
  InsufficientRank,
  DegenerateLocalVariation,
  InvalidArgument,
  Io,
  Format,
  Manifest,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `kind()` lets callers branch and
// `sample_index()` names the offending item when a per-sample step fails.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> sample_index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }
  std::optional<std::size_t> sample_index() const noexcept { return sample_; }

  /// Same error attributed to sample `index`.
  Error at_sample(std::size_t index) const { return Error(kind_, message_, index); }

 private:
  ErrorKind kind_;
  std::string message_;
  std::optional<std::size_t> sample_;
};

}  // namespace fbasis
