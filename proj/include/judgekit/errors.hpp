#pragma once

#include <stdexcept>
#include <string>

namespace judgekit {

// Every failure the library reports deliberately goes through one of these
// types. Anything else escaping is a bug.
enum class errc {
  length_mismatch,
  scale_mismatch,
  constant_input,
  degenerate_marginals,
  missing_cell,
  insufficient_data,
  out_of_range,
  zero_human_variance,
  invalid_profile,
  empty_input,
  alignment_error,
  unparseable_output,
  endpoint_error,
  auth_error,
  rate_limit_exhausted,
  timeout,
  malformed_response,
  parse_error,
  validation_error,
  row_count_mismatch,
  io_error,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

#define JUDGEKIT_DEFINE_ERROR(Name, Code)                                     \
  class Name : public Error {                                                 \
  public:                                                                     \
    explicit Name(const std::string& what) : Error(Code, what) {}             \
  }

JUDGEKIT_DEFINE_ERROR(LengthMismatchError, errc::length_mismatch);
JUDGEKIT_DEFINE_ERROR(ScaleMismatchError, errc::scale_mismatch);
JUDGEKIT_DEFINE_ERROR(ConstantInputError, errc::constant_input);
JUDGEKIT_DEFINE_ERROR(DegenerateMarginalsError, errc::degenerate_marginals);
JUDGEKIT_DEFINE_ERROR(MissingCellError, errc::missing_cell);
JUDGEKIT_DEFINE_ERROR(InsufficientDataError, errc::insufficient_data);
JUDGEKIT_DEFINE_ERROR(OutOfRangeError, errc::out_of_range);
JUDGEKIT_DEFINE_ERROR(InvalidProfileError, errc::invalid_profile);
JUDGEKIT_DEFINE_ERROR(EmptyInputError, errc::empty_input);
JUDGEKIT_DEFINE_ERROR(AlignmentError, errc::alignment_error);
JUDGEKIT_DEFINE_ERROR(UnparseableOutputError, errc::unparseable_output);
JUDGEKIT_DEFINE_ERROR(EndpointError, errc::endpoint_error);
JUDGEKIT_DEFINE_ERROR(AuthError, errc::auth_error);
JUDGEKIT_DEFINE_ERROR(RateLimitExhaustedError, errc::rate_limit_exhausted);
JUDGEKIT_DEFINE_ERROR(TimeoutError, errc::timeout);
JUDGEKIT_DEFINE_ERROR(MalformedResponseError, errc::malformed_response);
JUDGEKIT_DEFINE_ERROR(RowCountMismatchError, errc::row_count_mismatch);
JUDGEKIT_DEFINE_ERROR(IoError, errc::io_error);

#undef JUDGEKIT_DEFINE_ERROR

// Parse and validation failures carry their location so CLI output can
// point at the offending line.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(errc::parse_error, "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public Error {
public:
  ValidationError(std::string item_id, const std::string& reason)
      : Error(errc::validation_error, reason.empty() ? item_id : item_id + ": " + reason),
        item_id_(std::move(item_id)) {}
  const std::string& item_id() const noexcept { return item_id_; }

private:
  std::string item_id_;
};

}  // namespace judgekit
