#ifndef MCBRP_ERROR_HPP_
#define MCBRP_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcbrp {

enum class ErrorCode {
  kIo,
  kMissingColumn,
  kNonNumericCell,
  kEmptyDataset,
  kInvalidArgument,
  kDimensionMismatch,
  kEmptyPartition,
  kZeroVariance,
  kInsufficientEvidence,
  kNotLargeError,
  kFormat,
};

std::string_view ToString(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so callers
// (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mcbrp

#endif  // MCBRP_ERROR_HPP_
