#pragma once

#include <functional>
#include <string>
#include <vector>

#include "catmap/arith.hpp"

namespace catmap {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckOptions {
  CatMap A = validate_map(2, 1, 3, 2);
  bool quick = false;
  std::uint64_t seed = 20240601;
  unsigned workers = 1;
};

/// The invariant suite, one result per property. on_result is called as
/// each check finishes.
std::vector<CheckResult> run_checks(const CheckOptions& options,
                                    const std::function<void(const CheckResult&)>& on_result = {});

std::vector<std::string> check_names();

}  // namespace catmap
