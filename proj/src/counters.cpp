#include "rcfhe/counters.hpp"

namespace rcfhe {

namespace {
thread_local CounterScope* innermost = nullptr;
}

struct CounterAccess {
    static OpCounters* counts(CounterScope* s) { return s ? &s->counts_ : nullptr; }
};

CounterScope::CounterScope() : parent_(innermost) { innermost = this; }

CounterScope::~CounterScope() { innermost = parent_; }

OpCounters op_counters()
{
    return innermost ? innermost->counters() : OpCounters{};
}

void reset_counters()
{
    if (innermost)
        innermost->reset();
}

namespace detail {
OpCounters* active_counters() { return CounterAccess::counts(innermost); }
}  // namespace detail

}  // namespace rcfhe
