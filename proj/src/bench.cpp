#include "rcfhe/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <stdexcept>

#include "rcfhe/gsw.hpp"
#include "rcfhe/hom_ops.hpp"
#include "rcfhe/keys.hpp"

namespace rcfhe {

const std::vector<std::string>& bench_ops()
{
    static const std::vector<std::string> ops{"add", "mul", "scalar_mul", "scalar_add"};
    return ops;
}

namespace {

template <class F>
BenchRow measure(const std::string& op, const char* repr, const Params& p, F&& f)
{
    BenchRow row{op, repr, p.n, p.ell, {}, 0};
    CounterScope scope;
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    row.counters = scope.counters();
    row.wall_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
    return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& opts)
{
    for (const auto& op : opts.ops)
        if (std::find(bench_ops().begin(), bench_ops().end(), op) == bench_ops().end())
            throw std::invalid_argument("unknown bench op '" + op + "'");

    std::vector<BenchRow> rows;
    for (const auto& op : opts.ops) {
        for (std::uint32_t ell : opts.ells) {
            const Params p = make_params(opts.n, opts.m, ell, ell / 4, ell / 4, 1);
            Rng rng(opts.seed ^ (std::uint64_t{ell} << 32));
            const KeyPair keys = keygen(p, rng);
            const Word mu1 = rng() & p.mask();
            const Word mu2 = rng() & p.mask();
            const Word alpha = rng() & p.mask();
            const ReducedCipher a = encrypt(keys.pub, mu1, rng);
            const ReducedCipher b = encrypt(keys.pub, mu2, rng);
            const Cipher af = to_full(a);
            const Cipher bf = to_full(b);

            if (opts.reduced) {
                rows.push_back(measure(op, "reduced", p, [&] {
                    if (op == "add")
                        (void)add(a, b);
                    else if (op == "mul")
                        (void)mul(af, b);
                    else if (op == "scalar_mul")
                        (void)scalar_mul(alpha, a);
                    else
                        (void)scalar_add(alpha, a);
                }));
            }
            if (opts.full) {
                rows.push_back(measure(op, "full", p, [&] {
                    if (op == "add")
                        (void)add_full(af, bf);
                    else if (op == "mul")
                        (void)mul_full(af, bf);
                    else if (op == "scalar_mul")
                        (void)scalar_mul_full(alpha, af);
                    else
                        (void)scalar_add_full(alpha, af);
                }));
            }
        }
    }
    return rows;
}

void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows)
{
    os << "op,repr,n,ell,word_mults,word_adds,bit_ops,wall_ns\n";
    for (const auto& r : rows)
        os << r.op << ',' << r.repr << ',' << r.n << ',' << r.ell << ',' << r.counters.word_mults
           << ',' << r.counters.word_adds << ',' << r.counters.bit_ops << ',' << r.wall_ns << '\n';
}

}  // namespace rcfhe
