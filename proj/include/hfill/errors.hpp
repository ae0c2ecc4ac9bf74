#ifndef HFILL_ERRORS_HPP_
#define HFILL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace hfill {

  enum class ErrorCode {
    syntax,
    unknown_generator,
    empty_relator,
    duplicate_relator,
    precondition_violated,
    overflow,
    non_simplicial,
    mismatched_boundary,
    non_integral_solution,
    non_unique,
    no_filling,
    budget_exceeded,
    degenerate_fit,
    geodesic_escapes_ball,
    unfillable_loop,
    invalid_embedding,
    schema_mismatch,
    invalid_argument
  };

  char const* to_string(ErrorCode code) noexcept;

  // All library failures surface as this exception; `code()` is stable and is
  // what the CLI maps onto exit statuses.
  class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, std::string const& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          _code(code) {}

    ErrorCode code() const noexcept {
      return _code;
    }

   private:
    ErrorCode _code;
  };

  // Parse errors additionally carry a 1-based position.
  class ParseError : public Error {
   public:
    ParseError(ErrorCode code, std::string const& msg, int line, int column)
        : Error(code,
                "line " + std::to_string(line) + ", column "
                    + std::to_string(column) + ": " + msg),
          _line(line),
          _column(column) {}

    int line() const noexcept {
      return _line;
    }
    int column() const noexcept {
      return _column;
    }

   private:
    int _line;
    int _column;
  };

}  // namespace hfill

#endif  // HFILL_ERRORS_HPP_
