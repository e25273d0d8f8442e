#pragma once

#include <cstdint>

namespace rcfhe {

/// Tallies of word-level operations. Truncation to ell bits is free: an
/// ell-bit adder or shifter wraps on its own, so it is not counted.
struct OpCounters {
    std::uint64_t word_mults = 0;
    std::uint64_t word_adds = 0;
    std::uint64_t bit_ops = 0;  // shift, mask, bit test, select

    OpCounters& operator+=(const OpCounters& o)
    {
        word_mults += o.word_mults;
        word_adds += o.word_adds;
        bit_ops += o.bit_ops;
        return *this;
    }
    bool operator==(const OpCounters&) const = default;
};

/// RAII accumulation scope. While alive (and innermost on this thread) every
/// counted operation executed on the thread records into it. Scopes nest;
/// an inner scope shadows the outer one and nothing is merged implicitly.
class CounterScope {
public:
    CounterScope();
    ~CounterScope();
    CounterScope(const CounterScope&) = delete;
    CounterScope& operator=(const CounterScope&) = delete;

    const OpCounters& counters() const { return counts_; }
    void reset() { counts_ = {}; }

private:
    friend struct CounterAccess;
    OpCounters counts_;
    CounterScope* parent_;
};

/// Snapshot of the innermost scope on this thread (zeros when none is open).
OpCounters op_counters();
void reset_counters();

namespace detail {

OpCounters* active_counters();

inline void tally_mults(std::uint64_t k)
{
    if (auto* c = active_counters())
        c->word_mults += k;
}
inline void tally_adds(std::uint64_t k)
{
    if (auto* c = active_counters())
        c->word_adds += k;
}
inline void tally_bits(std::uint64_t k)
{
    if (auto* c = active_counters())
        c->bit_ops += k;
}

}  // namespace detail
}  // namespace rcfhe
