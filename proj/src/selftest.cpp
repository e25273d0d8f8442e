#include "rcfhe/selftest.hpp"

#include <functional>
#include <sstream>

#include "rcfhe/counters.hpp"
#include "rcfhe/gsw.hpp"
#include "rcfhe/hom_ops.hpp"
#include "rcfhe/keys.hpp"

namespace rcfhe {

namespace {

using FlattenFn = std::function<BitMatrix(const WordMatrix&, unsigned)>;

BitMatrix corrupted_flatten(const WordMatrix& b, unsigned ell)
{
    BitMatrix out = reference::flatten(b, ell);
    out.set(0, 0, !out.get(0, 0));
    return out;
}

WordMatrix random_words(std::size_t rows, std::size_t cols, unsigned ell, Rng& rng)
{
    WordMatrix w(rows, cols);
    for (auto& v : w.data())
        v = rng() & word_mask(ell);
    return w;
}

WordMatrix alpha_identity(std::size_t n, Word alpha)
{
    WordMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) = alpha;
    return a;
}

struct Suite {
    std::vector<SelftestResult> results;

    void check(const std::string& name, const std::function<std::string()>& body)
    {
        SelftestResult r{name, false, {}};
        try {
            r.detail = body();
            r.pass = r.detail.empty();
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
};

std::string mismatch(int trial)
{
    std::ostringstream os;
    os << "mismatch at trial " << trial;
    return os.str();
}

}  // namespace

std::vector<SelftestResult> run_selftest(const SelftestOptions& opts)
{
    const FlattenFn flat =
        opts.mutate_flatten ? FlattenFn(corrupted_flatten) : FlattenFn(reference::flatten);
    const Params toy = make_params(2, 3, 8, 2, 2, 1);
    const unsigned ell = toy.ell;
    const std::size_t N = toy.N;
    Suite suite;
    Rng rng(opts.seed);
    const KeyPair keys = keygen(toy, rng);

    suite.check("bits_times_gadget", [&] {
        for (int t = 0; t < opts.trials; ++t) {
            const WordMatrix lambda = random_words(N, toy.width(), 64, rng);
            const WordMatrix lhs = reference::matmul(reference::bits_of(lambda, ell),
                                                     reference::gadget(toy.width(), ell));
            if (truncate(lhs, ell) != truncate(lambda, ell))
                return mismatch(t);
        }
        return std::string();
    });

    suite.check("bitdecomp_roundtrip", [&] {
        for (int t = 0; t < opts.trials; ++t) {
            const WordMatrix a = random_words(N, toy.width(), 64, rng);
            if (bit_decomp_inv(bit_decomp(a, ell)) != truncate(a, ell))
                return mismatch(t);
        }
        return std::string();
    });

    suite.check("encrypt_decrypt", [&] {
        for (int t = 0; t < opts.trials; ++t) {
            const Word mu = rng() & toy.mask();
            if (decrypt(keys.secret, encrypt(keys.pub, mu, rng)) != mu)
                return mismatch(t);
        }
        return std::string();
    });

    suite.check("full_reduced_roundtrip", [&] {
        for (int t = 0; t < opts.trials; ++t) {
            const ReducedCipher c = encrypt(keys.pub, rng() & toy.mask(), rng);
            if (to_reduced(to_full(c)) != c)
                return mismatch(t);
        }
        return std::string();
    });

    suite.check("literal_encrypt_matches_reduced", [&] {
        for (int t = 0; t < opts.trials; ++t) {
            const Word mu = rng() & toy.mask();
            const BitMatrix R = sample_mask(toy, rng);
            if (to_reduced(encrypt_full_with_mask(keys.pub, mu, R)) !=
                encrypt_with_mask(keys.pub, mu, R))
                return mismatch(t);
        }
        return std::string();
    });

    // The reduced result equals the reduction of the Flatten-based
    // full result.
    struct Pair {
        ReducedCipher a, b;
        Cipher af, bf;
        Word alpha;
    };
    auto next_pair = [&] {
        Pair p;
        p.a = encrypt(keys.pub, rng() & toy.mask(), rng);
        p.b = encrypt(keys.pub, rng() & toy.mask(), rng);
        p.af = to_full(p.a);
        p.bf = to_full(p.b);
        p.alpha = rng() & toy.mask();
        return p;
    };
    auto dense = [](const Cipher& c) { return reference::unpack(c.bits()); };

    suite.check("equivalence_add", [&] {
        for (int t = 0; t < opts.trials; ++t) {
            const Pair p = next_pair();
            const Cipher full(flat(reference::add(dense(p.af), dense(p.bf)), ell));
            if (add(p.a, p.b) != to_reduced(full))
                return mismatch(t);
        }
        return std::string();
    });
    suite.check("equivalence_mul", [&] {
        for (int t = 0; t < opts.trials; ++t) {
            const Pair p = next_pair();
            const Cipher full(flat(reference::matmul(dense(p.af), dense(p.bf)), ell));
            if (mul(p.af, p.b) != to_reduced(full))
                return mismatch(t);
        }
        return std::string();
    });
    suite.check("equivalence_scalar_mul", [&] {
        for (int t = 0; t < opts.trials; ++t) {
            const Pair p = next_pair();
            const BitMatrix inner = flat(alpha_identity(N, p.alpha), ell);
            const Cipher full(flat(reference::matmul(reference::unpack(inner), dense(p.af)), ell));
            if (scalar_mul(p.alpha, p.a) != to_reduced(full))
                return mismatch(t);
        }
        return std::string();
    });
    suite.check("equivalence_scalar_add", [&] {
        for (int t = 0; t < opts.trials; ++t) {
            const Pair p = next_pair();
            const Cipher full(flat(reference::add(dense(p.af), alpha_identity(N, p.alpha)), ell));
            if (scalar_add(p.alpha, p.a) != to_reduced(full))
                return mismatch(t);
        }
        return std::string();
    });

    suite.check("reduced_ops_multiply_free", [&] {
        const Pair p = next_pair();
        CounterScope scope;
        (void)add(p.a, p.b);
        (void)mul(p.af, p.b);
        (void)scalar_mul(p.alpha, p.a);
        (void)scalar_add(p.alpha, p.a);
        if (scope.counters().word_mults != 0)
            return std::string("reduced path counted word multiplications");
        return std::string();
    });

    suite.check("homomorphism_default_params", [&] {
        const Params p = default_params();
        Rng r(opts.seed + 1);
        const KeyPair k = keygen(p, r);
        for (int t = 0; t < 3; ++t) {
            // The product's noise grows with the right operand's message, so
            // keep it well inside the budget.
            const Word m1 = r();
            const Word m2 = embed(r.uniform_int(-(std::int64_t{1} << 40), std::int64_t{1} << 40), 64);
            const ReducedCipher c1 = encrypt(k.pub, m1, r);
            const ReducedCipher c2 = encrypt(k.pub, m2, r);
            if (decrypt(k.secret, add(c1, c2)) != m1 + m2 ||
                decrypt(k.secret, mul(to_full(c1), c2)) != m1 * m2)
                return mismatch(t);
        }
        return std::string();
    });

    return suite.results;
}

}  // namespace rcfhe
