#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dynkin {

/// Command-line front end. Exit codes: 0 all checks pass, 1 domain failure
/// (invalid generator, numerical breakdown, failed checks), 2 input error
/// (bad file, bad flags), 3 insufficient accepted samples.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynkin
