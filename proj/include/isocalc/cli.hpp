#ifndef ISOCALC_CLI_HPP
#define ISOCALC_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace isocalc::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kSuiteViolation = 1,
  kParseError = 2,
  kWellDefinedness = 3,
  kNumericalFailure = 4,
  kStructureViolation = 5,
  kGapTooSmall = 6,
};

/// Maps an error kind (isocalc::Error::kind()) to its exit code.
int exit_code_for(const std::string& kind);

/// Runs the tool on `args` (without the program name). Results go to `out`
/// unless --output names a file; errors are written to `err` as
/// {"kind": ..., "message": ..., "exit_code": ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isocalc::cli

#endif  // ISOCALC_CLI_HPP
