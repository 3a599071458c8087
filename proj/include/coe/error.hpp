#pragma once

#include <stdexcept>
#include <string>

namespace coe {

/// Process exit codes shared by every subcommand.
enum class ExitCode : int {
  kOk = 0,
  kInputInvalid = 2,
  kComputeFailed = 3,
  kIoFailed = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed or inconsistent user input (bad record, unmatched id, out-of-range score).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::kInputInvalid, what) {}
};

/// A computation whose preconditions hold syntactically but cannot produce a value.
class ComputeError : public Error {
 public:
  explicit ComputeError(const std::string& what) : Error(ExitCode::kComputeFailed, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::kIoFailed, what) {}
};

const char* exit_code_name(ExitCode code) noexcept;

}  // namespace coe
