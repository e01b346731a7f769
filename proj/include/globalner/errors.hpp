#pragma once

#include <stdexcept>
#include <string>

namespace globalner {

// Malformed input: files, configs, label sequences, misaligned datasets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure inside a retrieval backend.
class BackendError : public std::runtime_error {
 public:
  enum class Kind { transport, status, payload };

  BackendError(Kind kind, const std::string& message, bool retryable = false)
      : std::runtime_error(message), kind_(kind), retryable_(retryable) {}

  Kind kind() const { return kind_; }
  bool retryable() const { return retryable_; }

 private:
  Kind kind_;
  bool retryable_;
};

}  // namespace globalner
