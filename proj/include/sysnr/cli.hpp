#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sysnr::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kData = 2,        // I/O, parse, schema and domain errors
    kNumeric = 3,     // numeric degeneracy
    kAuditFailed = 4, // audit-table31 found a non-flagged cell outside tolerance
};

/// Runs one command. `args` excludes the program name. Results go to `out`
/// (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sysnr::cli
