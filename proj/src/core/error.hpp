#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdti {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  Diverged,
  Budget,
  Runtime,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when a combination's cost stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t combination, std::size_t sdti_epoch)
      : Error(ErrorCode::Diverged,
              "non-finite cost for combination " + std::to_string(combination) +
                  " at sdti epoch " + std::to_string(sdti_epoch)),
        combination_(combination),
        sdti_epoch_(sdti_epoch) {}

  std::size_t combination() const noexcept { return combination_; }
  std::size_t sdti_epoch() const noexcept { return sdti_epoch_; }

 private:
  std::size_t combination_;
  std::size_t sdti_epoch_;
};

}  // namespace sdti
