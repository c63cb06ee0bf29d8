#ifndef GPD_CLI_HPP
#define GPD_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace gpd {

// Runs one invocation of the command-line front end.  `args` excludes the
// program name.  Exit code contract: 0 = success, 1 = the queried property
// is mathematically false (not group-type, no coordinate system, not
// separable, not strong, correspondence hypotheses unmet), 2 = unusable
// input (diagnostics, unknown names, bad usage).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace gpd

#endif
