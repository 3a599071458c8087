#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace coe::cli {

/// Seed used by prepare and ablate when --seed is not given.
inline constexpr std::uint64_t kDefaultSeed = 42;

struct HypothesisRecord {
  std::string id;
  std::string hypothesis;
};

/// JSON Lines {"id", "hypothesis"}; blank lines are skipped. Throws
/// InputError on malformed lines or duplicate ids.
std::vector<HypothesisRecord> parse_hypotheses(std::string_view content);

/// Runs the `coe` command line. Returns the process exit code: 0 success,
/// 2 invalid input, 3 computation failure, 4 I/O failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace coe::cli
