#include "nullstream/errors.hpp"

namespace nullstream {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kDegenerateInput: return "DegenerateInput";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kOverlapDetected: return "OverlapDetected";
    case ErrorKind::kRankDeficient: return "RankDeficient";
    case ErrorKind::kEmptyList: return "EmptyList";
    case ErrorKind::kZeroDimensional: return "ZeroDimensional";
    case ErrorKind::kBudgetViolation: return "BudgetViolation";
    case ErrorKind::kAcceptanceTooRare: return "AcceptanceTooRare";
    case ErrorKind::kNotUnit: return "NotUnit";
    case ErrorKind::kNotSeparableInProjection: return "NotSeparableInProjection";
    case ErrorKind::kDegenerateOutput: return "DegenerateOutput";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace nullstream
