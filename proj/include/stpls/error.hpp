#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stpls {

enum class ErrorCode {
  invalid_argument,
  non_finite_input,
  constant_column,
  dimension_mismatch,
  zero_matrix,
  zero_vector,
  no_convergence,
  component_count_too_large,
  singular_gram,
  column_mismatch,
  too_few_rows,
  all_points_infeasible,
  parse_error,
  io_failure,
  schema_mismatch,
  corrupt_archive,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::non_finite_input: return "NonFiniteInput";
    case ErrorCode::constant_column: return "ConstantColumn";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::zero_matrix: return "ZeroMatrix";
    case ErrorCode::zero_vector: return "ZeroVector";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::component_count_too_large: return "ComponentCountTooLarge";
    case ErrorCode::singular_gram: return "SingularGram";
    case ErrorCode::column_mismatch: return "ColumnMismatch";
    case ErrorCode::too_few_rows: return "TooFewRows";
    case ErrorCode::all_points_infeasible: return "AllPointsInfeasible";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::schema_mismatch: return "SchemaMismatch";
    case ErrorCode::corrupt_archive: return "CorruptArchive";
  }
  return "Unknown";
}

/// Every failure raised by the library. `what()` is prefixed with the code
/// name so diagnostics stay greppable from the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stpls
