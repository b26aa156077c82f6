#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nullstream {

enum class ErrorKind {
  kInvalidArgument,
  kDegenerateInput,
  kDimensionMismatch,
  kOverlapDetected,
  kRankDeficient,
  kEmptyList,
  kZeroDimensional,
  kBudgetViolation,
  kAcceptanceTooRare,
  kNotUnit,
  kNotSeparableInProjection,
  kDegenerateOutput,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library. Callers that only need to
/// triage (e.g. the CLI exit-code mapping) can switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class ErrorOf : public Error {
 public:
  explicit ErrorOf(const std::string& what) : Error(K, what) {}
};

using InvalidArgument = ErrorOf<ErrorKind::kInvalidArgument>;
using DegenerateInput = ErrorOf<ErrorKind::kDegenerateInput>;
using DimensionMismatch = ErrorOf<ErrorKind::kDimensionMismatch>;
using OverlapDetected = ErrorOf<ErrorKind::kOverlapDetected>;
using RankDeficient = ErrorOf<ErrorKind::kRankDeficient>;
using EmptyList = ErrorOf<ErrorKind::kEmptyList>;
using ZeroDimensional = ErrorOf<ErrorKind::kZeroDimensional>;
using BudgetViolation = ErrorOf<ErrorKind::kBudgetViolation>;
using AcceptanceTooRare = ErrorOf<ErrorKind::kAcceptanceTooRare>;
using NotUnit = ErrorOf<ErrorKind::kNotUnit>;
using NotSeparableInProjection = ErrorOf<ErrorKind::kNotSeparableInProjection>;
using DegenerateOutput = ErrorOf<ErrorKind::kDegenerateOutput>;

}  // namespace nullstream
