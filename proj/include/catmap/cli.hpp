#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace catmap {

/// Exit codes: 0 success, 1 validation or engine error, 2 usage error,
/// 3 `check` found a failing invariant.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace catmap
