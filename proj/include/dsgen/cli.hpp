#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dsgen::cli {

/// Exit statuses returned by dispatch.
enum ExitStatus : int {
  kOk = 0,
  kFailure = 1,     // fatal error; JSON summary on stderr
  kUsage = 2,       // bad command line or config
  kPartial = 3,     // batch finished but some samples were skipped
  kCheckFailed = 4, // demo self-check out of tolerance
};

/// Runs one command line (without the program name). Logs and error
/// summaries go to `err`; human-readable summaries go to `out`; data goes to
/// files only.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dsgen::cli
