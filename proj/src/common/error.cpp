#include "coe/error.hpp"

namespace coe {

const char* exit_code_name(ExitCode code) noexcept {
  switch (code) {
    case ExitCode::kOk: return "ok";
    case ExitCode::kInputInvalid: return "input-invalid";
    case ExitCode::kComputeFailed: return "compute-failed";
    case ExitCode::kIoFailed: return "io-failed";
  }
  return "unknown";
}

}  // namespace coe
