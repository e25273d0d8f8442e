#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rcfhe {

struct SelftestResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelftestOptions {
    std::uint64_t seed = 1;
    int trials = 20;
    /// Runs the full-path side of the equivalence checks through a Flatten
    /// that corrupts one bit; those checks must then fail.
    bool mutate_flatten = false;
};

/// Toy-parameter equivalence suite plus a short check at the default scheme
/// parameters.
std::vector<SelftestResult> run_selftest(const SelftestOptions& opts);

}  // namespace rcfhe
