#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pfaff {

enum class ErrorKind {
  SyntaxError,
  UnknownCoordinate,
  ZeroDenominator,
  PoleAtPoint,
  InvalidChart,
  DimensionMismatch,
  SamplingExhausted,
  RankInstability,
  NotASubmersion,
  TransversalityFails,
  VerticalPartNotConstantRank,
  VerticalPartNotInvolutive,
  SingularPoint,
  NoGlobalParametrization,
  NotAProjection,
  EmbeddingRankDrop,
  NotASection,
  SingularFrame,
  StructureViolation,
  CorrespondenceMismatch,
  NotInternal,
  NotInGCpi,
  SpecInvalid,
  UnresolvedReference,
  DuplicateName,
  InvalidInput,
  Internal,
};

inline std::string_view kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownCoordinate: return "UnknownCoordinate";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::PoleAtPoint: return "PoleAtPoint";
    case ErrorKind::InvalidChart: return "InvalidChart";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SamplingExhausted: return "SamplingExhausted";
    case ErrorKind::RankInstability: return "RankInstability";
    case ErrorKind::NotASubmersion: return "NotASubmersion";
    case ErrorKind::TransversalityFails: return "TransversalityFails";
    case ErrorKind::VerticalPartNotConstantRank: return "VerticalPartNotConstantRank";
    case ErrorKind::VerticalPartNotInvolutive: return "VerticalPartNotInvolutive";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::NoGlobalParametrization: return "NoGlobalParametrization";
    case ErrorKind::NotAProjection: return "NotAProjection";
    case ErrorKind::EmbeddingRankDrop: return "EmbeddingRankDrop";
    case ErrorKind::NotASection: return "NotASection";
    case ErrorKind::SingularFrame: return "SingularFrame";
    case ErrorKind::StructureViolation: return "StructureViolation";
    case ErrorKind::CorrespondenceMismatch: return "CorrespondenceMismatch";
    case ErrorKind::NotInternal: return "NotInternal";
    case ErrorKind::NotInGCpi: return "NotInGCpi";
    case ErrorKind::SpecInvalid: return "SpecInvalid";
    case ErrorKind::UnresolvedReference: return "UnresolvedReference";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::Internal: return "Internal";
  }
  return "Internal";
}

/// Every failure raised by the library. `kind()` is stable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace pfaff
