#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pathgauge {

enum class ErrorCode {
  kInvalidArgument,
  kDirectionMismatch,
  kEmptyInput,
  kInconsistentDeltaW,
  kInsufficientData,
  kWrongTableKind,
  kGridMismatch,
  kAllTrialsSkipped,
  kIo,
  kParse,
  kConfig,
};

std::string_view to_string(ErrorCode code);

// Library-wide exception. Callers that need to branch on the failure kind
// inspect code(); the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pathgauge
