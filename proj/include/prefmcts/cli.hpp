#ifndef PREFMCTS_CLI_HPP
#define PREFMCTS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace prefmcts::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitRange = 3;
inline constexpr int kExitData = 4;

/// Entry point of the `prefmcts` tool. `args` excludes the program name.
/// Results go to `out`, warnings and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prefmcts::cli

#endif  // PREFMCTS_CLI_HPP
