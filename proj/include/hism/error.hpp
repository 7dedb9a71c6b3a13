#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hism {

enum class ErrorCode {
  invalid_argument,
  layout_overflow,
  missing_telemetry,
  empty_rect,
  infeasible_schedule,
  io_failure,
  parse_error,
  non_monotonic_time,
  insufficient_data,
  grid_mismatch,
  event_out_of_range,
  unknown_element,
  shape_mismatch,
  non_finite_activation,
  empty_sequence,
  bad_magic,
  version_mismatch,
  class_imbalance,
  empty_dataset,
  missing_frames,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code carries the failure kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the error-kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace hism
