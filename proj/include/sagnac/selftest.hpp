#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sagnac/types.hpp"

namespace sagnac::selftest {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

struct Options {
  Index n_max = 40;          // integrator basis cutoff
  std::optional<double> dt;  // integrator step; unset means T / 20000
  int workers = 2;
};

/// Full invariant suite and oracle-equivalence battery.
std::vector<CheckResult> run_all(const Options& options);

/// True when every check passed.
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace sagnac::selftest
