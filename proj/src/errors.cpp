#include "hfill/errors.hpp"

namespace hfill {

  char const* to_string(ErrorCode code) noexcept {
    switch (code) {
      case ErrorCode::syntax: return "SYNTAX";
      case ErrorCode::unknown_generator: return "UNKNOWN_GENERATOR";
      case ErrorCode::empty_relator: return "EMPTY_RELATOR";
      case ErrorCode::duplicate_relator: return "DUPLICATE_RELATOR";
      case ErrorCode::precondition_violated: return "PRECONDITION_VIOLATED";
      case ErrorCode::overflow: return "OVERFLOW";
      case ErrorCode::non_simplicial: return "NON_SIMPLICIAL";
      case ErrorCode::mismatched_boundary: return "MISMATCHED_BOUNDARY";
      case ErrorCode::non_integral_solution: return "NON_INTEGRAL_SOLUTION";
      case ErrorCode::non_unique: return "NON_UNIQUE";
      case ErrorCode::no_filling: return "NO_FILLING";
      case ErrorCode::budget_exceeded: return "BUDGET_EXCEEDED";
      case ErrorCode::degenerate_fit: return "DEGENERATE_FIT";
      case ErrorCode::geodesic_escapes_ball: return "GEODESIC_ESCAPES_BALL";
      case ErrorCode::unfillable_loop: return "UNFILLABLE_LOOP";
      case ErrorCode::invalid_embedding: return "INVALID_EMBEDDING";
      case ErrorCode::schema_mismatch: return "SCHEMA_MISMATCH";
      case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    }
    return "UNKNOWN";
  }

}  // namespace hfill
