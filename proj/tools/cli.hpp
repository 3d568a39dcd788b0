#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace longtie::cli {

/// Runs one subcommand. Returns 0 on success, 1 on a runtime failure and 2 on
/// a usage error; failures print a one-line JSON object to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace longtie::cli
