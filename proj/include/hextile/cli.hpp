#ifndef HEXTILE_CLI_HPP
#define HEXTILE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace hextile
{

enum ExitCode : int
{
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitBudget = 3,
    kExitInput = 4
};

// Entry point of the `hextile` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hextile

#endif // HEXTILE_CLI_HPP
