#pragma once

// Command-line entry point: generate, validate, solve, obfuscate, run, score
// and report. Lives in the library so it can be driven in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace plancritic::cli {

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitUsage = 2;

/// `args` excludes the program name. Data goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plancritic::cli
