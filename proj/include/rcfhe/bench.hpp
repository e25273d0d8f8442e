#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rcfhe/counters.hpp"

namespace rcfhe {

struct BenchRow {
    std::string op;
    std::string repr;  // "reduced" or "full"
    std::uint32_t n = 0;
    std::uint32_t ell = 0;
    OpCounters counters;
    std::uint64_t wall_ns = 0;
};

struct BenchOptions {
    std::vector<std::string> ops{"add", "mul", "scalar_mul", "scalar_add"};
    std::vector<std::uint32_t> ells{8, 16, 32};
    bool reduced = true;
    bool full = true;
    std::uint32_t n = 2;
    std::uint32_t m = 3;
    std::uint64_t seed = 1;
};

/// Known op names, in CSV order.
const std::vector<std::string>& bench_ops();

/// One measured call per (op, repr, ell). Scheme parameters per ell are
/// n, m, Q(ell/4, ell/4) and noise bound 1. Throws std::invalid_argument on an
/// unknown op.
std::vector<BenchRow> run_bench(const BenchOptions& opts);

/// op,repr,n,ell,word_mults,word_adds,bit_ops,wall_ns
void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows);

}  // namespace rcfhe
