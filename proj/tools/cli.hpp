#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace atomfringe::cli {

enum ExitCode : int { ok = 0, numerical_failure = 1, input_error = 2 };

/// Runs one command line (without the program name). Messages go to `out`/`err`,
/// data files to the --out directory.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a over the canonical JSON dump of a run configuration.
std::string config_hash(const std::string& canonical);

}  // namespace atomfringe::cli
