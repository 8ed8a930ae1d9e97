#pragma once

#include <string>
#include <vector>

namespace qgreeks {

// Entry point shared by the binary and the tests. Subcommands: price, greek,
// gsa, convergence, bias-sweep, reproduce-table. Returns 0 on success, 2 on
// configuration errors, 1 on numerical failure.
int run_cli(const std::vector<std::string>& args);

} // namespace qgreeks
