#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace freeprob {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

struct VerifyOptions {
  std::vector<std::string> only;  // name prefixes; empty = full suite
  std::uint64_t seed = 20240803;
};

// The oracle/invariant suite: acceptance checks C01..C13 plus the cross-module
// invariant sweeps. Deterministic for a fixed seed.
std::vector<CheckResult> run_verify_suite(const VerifyOptions& options);

}  // namespace freeprob
