// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rcfhe/control.hpp"
#include "rcfhe/counters.hpp"
#include "rcfhe/encrypted_loop.hpp"
#include "rcfhe/fixed_point.hpp"
#include "rcfhe/gsw.hpp"
#include "rcfhe/hom_ops.hpp"
#include "rcfhe/keys.hpp"

using namespace rcfhe;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t)
{
    return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body)
{
    Outcome o;
    const auto start = Clock::now();
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass)
        ++failures;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
                o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
}

// Dense test-side oracles for the literal full-cipher path -------------------

using Dense = std::vector<std::vector<Word>>;

Dense dense_of(const Cipher& c)
{
    const std::size_t n = c.size();
    Dense d(n, std::vector<Word>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d[i][j] = c.bits().get(i, j);
    return d;
}

Dense dense_add(const Dense& a, const Dense& b)
{
    Dense out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            out[i][j] += b[i][j];
    return out;
}

Dense dense_mul(const Dense& a, const Dense& b)
{
    const std::size_t n = a.size();
    Dense out(n, std::vector<Word>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < n; ++j)
                    out[i][j] += a[i][k] * b[k][j];
    return out;
}

Dense alpha_diag(std::size_t n, Word alpha)
{
    Dense d(n, std::vector<Word>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        d[i][i] = alpha;
    return d;
}

// b * G_{n+1} mod 2^ell, with G = I (x) [1, 2, ..., 2^(ell-1)].
Dense times_gadget(const Dense& b, unsigned ell)
{
    const std::size_t blocks = b[0].size() / ell;
    const Word mask = ell == 64 ? ~Word{0} : (Word{1} << ell) - 1;
    Dense out(b.size(), std::vector<Word>(blocks, 0));
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t c = 0; c < blocks; ++c) {
            Word acc = 0;
            Word pow = 1;
            for (unsigned k = 0; k < ell; ++k, pow <<= 1)
                acc += b[i][c * ell + k] * pow;
            out[i][c] = acc & mask;
        }
    return out;
}

// [x]^ell, one 0/1 entry per bit, LSB first.
Dense bits(const Dense& x, unsigned ell)
{
    Dense out(x.size(), std::vector<Word>(x[0].size() * ell));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t c = 0; c < x[0].size(); ++c)
            for (unsigned k = 0; k < ell; ++k)
                out[i][c * ell + k] = (x[i][c] >> k) & 1;
    return out;
}

Dense flatten_oracle(const Dense& b, unsigned ell) { return bits(times_gadget(b, ell), ell); }

Dense reduced_of(const Dense& full, unsigned ell) { return times_gadget(full, ell); }

bool same(const ReducedCipher& got, const Dense& want)
{
    for (std::size_t i = 0; i < got.rows(); ++i)
        for (std::size_t j = 0; j < got.cols(); ++j)
            if (got.words()(i, j) != want[i][j])
                return false;
    return true;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// floor(a / 2^s) by integer division.
__int128 floor_shift(__int128 a, int s)
{
    const __int128 d = static_cast<__int128>(1) << s;
    __int128 q = a / d;
    if (a % d != 0 && a < 0)
        --q;
    return q;
}

double late_peak(const TraceLog& log, double after)
{
    double peak = 0;
    for (const auto& r : log.rows)
        if (r.t > after)
            peak = std::max({peak, std::abs(r.x.theta1), std::abs(r.x.theta2)});
    return peak;
}

}  // namespace

int main()
{
    const Params defaults = default_params();

    report(1, "encrypt/decrypt roundtrip", [&] {
        const auto start = Clock::now();
        long bad = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            Rng r(seed);
            const KeyPair k = keygen(defaults, r);
            for (int i = 0; i < 1000; ++i) {
                const Word mu = r();
                if (decrypt(k.secret, encrypt(k.pub, mu, r)) != mu)
                    ++bad;
            }
        }
        const double t = seconds_since(start);
        return Outcome{bad == 0 && t < 120,
                       fmt("%.0f mismatches in 10 seeds x 1000, %.1f s (limit 120 s)", double(bad), t)};
    });

    report(2, "homomorphism mod 2^64", [&] {
        Rng r(2024);
        const KeyPair k = keygen(defaults, r);
        long bad[4] = {0, 0, 0, 0};
        for (int i = 0; i < 1000; ++i) {
            const Word m1 = r(), m2 = r(), alpha = r();
            // Product noise is mu2 * e1 + C1 * e2, so the right operand is
            // kept at 40 bits to stay inside the 2^62 budget.
            const Word small = embed(r.uniform_int(-(std::int64_t{1} << 40), std::int64_t{1} << 40), 64);
            const ReducedCipher c1 = encrypt(k.pub, m1, r), c2 = encrypt(k.pub, m2, r);
            const ReducedCipher cs = encrypt(k.pub, small, r);
            bad[0] += decrypt(k.secret, add(c1, c2)) != m1 + m2;
            bad[1] += decrypt(k.secret, mul(to_full(c1), cs)) != m1 * small;
            bad[2] += decrypt(k.secret, scalar_mul(alpha, c2)) != alpha * m2;
            bad[3] += decrypt(k.secret, scalar_add(alpha, c2)) != alpha + m2;
        }
        const long total = bad[0] + bad[1] + bad[2] + bad[3];
        std::ostringstream os;
        os << "1000 pairs; mismatches add " << bad[0] << ", mul " << bad[1] << ", scalar_mul "
           << bad[2] << ", scalar_add " << bad[3];
        return Outcome{total == 0, os.str()};
    });

    report(3, "reduced path equals reduced literal path (l=8, n=2, m=3)", [&] {
        const auto start = Clock::now();
        const Params toy = make_params(2, 3, 8, 2, 2, 1);
        const unsigned ell = toy.ell;
        Rng r(33);
        const KeyPair k = keygen(toy, r);
        long bad = 0;
        for (int i = 0; i < 200; ++i) {
            const ReducedCipher a = encrypt(k.pub, r() & 0xff, r);
            const ReducedCipher b = encrypt(k.pub, r() & 0xff, r);
            const Cipher af = to_full(a), bf = to_full(b);
            const Dense da = dense_of(af), db = dense_of(bf);
            bad += !same(add(a, b), reduced_of(flatten_oracle(dense_add(da, db), ell), ell));
            bad += !same(mul(af, b), reduced_of(flatten_oracle(dense_mul(da, db), ell), ell));
            if (i < 50) {
                const Word alpha = r() & 0xff;
                const Dense fa = flatten_oracle(alpha_diag(toy.N, alpha), ell);
                bad += !same(scalar_mul(alpha, a),
                             reduced_of(flatten_oracle(dense_mul(fa, da), ell), ell));
                bad += !same(scalar_add(alpha, a),
                             reduced_of(flatten_oracle(dense_add(da, alpha_diag(toy.N, alpha)), ell), ell));
            }
        }
        // [L]^ell G = (L)^ell for arbitrary word matrices of random shape.
        long gadget_bad = 0;
        for (int i = 0; i < 200; ++i) {
            const std::size_t rows = 1 + r() % 24, cols = 1 + r() % 6;
            const unsigned l = 1 + static_cast<unsigned>(r() % 64);
            WordMatrix lambda(rows, cols);
            Dense dl(rows, std::vector<Word>(cols));
            for (std::size_t x = 0; x < rows; ++x)
                for (std::size_t y = 0; y < cols; ++y)
                    dl[x][y] = lambda(x, y) = r();
            const BitMatrix bd = bit_decomp(lambda, l);
            Dense got(rows, std::vector<Word>(cols * l));
            for (std::size_t x = 0; x < rows; ++x)
                for (std::size_t y = 0; y < cols * l; ++y)
                    got[x][y] = bd.get(x, y);
            const Dense lhs = times_gadget(got, l);
            const WordMatrix inv = bit_decomp_inv(bd);
            const Word mask = l == 64 ? ~Word{0} : (Word{1} << l) - 1;
            for (std::size_t x = 0; x < rows; ++x)
                for (std::size_t y = 0; y < cols; ++y)
                    gadget_bad += lhs[x][y] != (dl[x][y] & mask) || inv(x, y) != (dl[x][y] & mask);
        }
        const double t = seconds_since(start);
        std::ostringstream os;
        os << "200 pairs, 50 alpha: " << bad << " mismatches; bits*G identity on 200 matrices: " << gadget_bad
           << " mismatches; " << fmt("%.1f s (limit 60 s)", t);
        return Outcome{bad == 0 && gadget_bad == 0 && t < 60, os.str()};
    });

    report(4, "reduced ops use no word multiplications", [&] {
        Rng r(44);
        const KeyPair k = keygen(defaults, r);
        const ReducedCipher a = encrypt(k.pub, r(), r), b = encrypt(k.pub, 12345, r);
        const Cipher af = to_full(a), bf = to_full(b);
        const Word alpha = r();
        auto mults = [](const std::function<void()>& op) {
            CounterScope s;
            op();
            return s.counters().word_mults;
        };
        const std::uint64_t red[4] = {
            mults([&] { (void)add(a, b); }), mults([&] { (void)mul(af, b); }),
            mults([&] { (void)scalar_mul(alpha, a); }), mults([&] { (void)scalar_add(alpha, a); })};
        const std::uint64_t full[4] = {
            mults([&] { (void)add_full(af, bf); }), mults([&] { (void)mul_full(af, bf); }),
            mults([&] { (void)scalar_mul_full(alpha, af); }),
            mults([&] { (void)scalar_add_full(alpha, af); })};
        bool ok = true;
        for (int i = 0; i < 4; ++i)
            ok = ok && red[i] == 0 && full[i] > 0;
        std::ostringstream os;
        os << "reduced word_mults add/mul/smul/sadd = " << red[0] << "/" << red[1] << "/" << red[2]
           << "/" << red[3] << "; full = " << full[0] << "/" << full[1] << "/" << full[2] << "/"
           << full[3];
        return Outcome{ok, os.str()};
    });

    report(5, "reduced add word_adds scaling over l = 8, 16, 32 (n=2)", [&] {
        std::vector<double> adds, lin, quad;
        for (unsigned ell : {8u, 16u, 32u}) {
            const Params p = make_params(2, 3, ell, ell / 4, ell / 4, 1);
            Rng r(55 + ell);
            const KeyPair k = keygen(p, r);
            const ReducedCipher a = encrypt(k.pub, 1, r), b = encrypt(k.pub, 2, r);
            CounterScope s;
            (void)add(a, b);
            adds.push_back(static_cast<double>(s.counters().word_adds));
            lin.push_back(static_cast<double>(p.N) * p.width());
            quad.push_back(static_cast<double>(p.N) * ell);
        }
        // Least-squares c for adds ~ c * model, then the per-point ratio error.
        auto worst_ratio = [&](const std::vector<double>& model) {
            double num = 0, den = 0;
            for (std::size_t i = 0; i < adds.size(); ++i) {
                num += adds[i] * model[i];
                den += model[i] * model[i];
            }
            const double c = num / den;
            double worst = 0;
            for (std::size_t i = 0; i < adds.size(); ++i)
                worst = std::max(worst, std::abs(adds[i] / (c * model[i]) - 1));
            return worst;
        };
        const double lin_err = worst_ratio(lin), quad_err = worst_ratio(quad);
        std::ostringstream os;
        os << "word_adds " << adds[0] << ", " << adds[1] << ", " << adds[2]
           << "; fit to N(n+1) (linear in l): worst ratio error " << lin_err * 100
           << "% (limit 20%); info: fit to l*N: " << quad_err * 100 << "%";
        return Outcome{lin_err <= 0.2, os.str()};
    });

    report(6, "Q10.22 product rescale is the exact floor", [&] {
        const QFormat q{10, 22, 64};
        Rng r(66);
        long bad = 0;
        for (int i = 0; i < 10000; ++i) {
            const double b1 = q.lower() + (q.upper() - q.lower()) * r.uniform_real();
            const double b2 = q.lower() + (q.upper() - q.lower()) * r.uniform_real();
            const Word w1 = q_encode(b1, q), w2 = q_encode(b2, q);
            const std::int64_t k1 = centered(w1, 64), k2 = centered(w2, 64);
            // The encoded values are the exact representable operands.
            const double e1 = std::ldexp(static_cast<double>(k1), -22);
            const double e2 = std::ldexp(static_cast<double>(k2), -22);
            const __int128 expect = floor_shift(static_cast<__int128>(k1) * k2, 22);
            const double want = std::ldexp(static_cast<double>(static_cast<std::int64_t>(expect)), -22);
            const double got = q_decode(rescale(q_mul_plain(w1, w2, 64), 22, 64), 22, 64);
            bad += got != want || std::abs(e1 - b1) > std::ldexp(1.0, -23) ||
                   std::abs(e2 - b2) > std::ldexp(1.0, -23);
        }
        return Outcome{bad == 0, fmt("%.0f mismatches in 10^4 pairs", double(bad))};
    });

    report(7, "observer pole placement", [&] {
        const Vec5 x0(0.0289, 0.0669, 0.1156, 0.0049, 0.0);
        const ControllerDesign d = design_controller(PlantParams{}, sample_period, x0);
        const auto poles = observer_poles();
        // Target expanded here by repeated multiplication.
        std::vector<double> target{1.0};
        for (double p : poles) {
            std::vector<double> next(target.size() + 1, 0.0);
            for (std::size_t i = 0; i < target.size(); ++i) {
                next[i] += target[i];
                next[i + 1] -= p * target[i];
            }
            target = next;
        }
        const auto got = char_poly(d.model.A_d - d.L * d.model.C_d);
        double err = 0;
        for (std::size_t i = 0; i < target.size(); ++i)
            err = std::max(err, std::abs(got[i] - target[i]));
        return Outcome{err < 1e-8, fmt("max coefficient error %.3g (limit 1e-8)", err)};
    });

    LoopConfig enc_cfg;
    enc_cfg.mode = LoopMode::Encrypted;
    enc_cfg.verify = true;
    enc_cfg.seed = 1;
    TraceLog enc_log;
    bool enc_ok = false;

    report(8, "encrypted loop is word-identical to the fixed-point twin", [&] {
        const auto start = Clock::now();
        enc_log = run_closed_loop(enc_cfg);
        enc_ok = true;
        const double t = seconds_since(start);
        LoopConfig fixed = enc_cfg;
        fixed.mode = LoopMode::Fixed;
        fixed.verify = false;
        const TraceLog fixed_log = run_closed_loop(fixed);
        const bool same = same_words(enc_log, fixed_log);
        std::ostringstream os;
        os << enc_log.rows.size() << " steps, " << (same ? "identical" : "DIFFERENT")
           << ", max noise " << enc_log.max_noise << " (budget 2^62), "
           << fmt("encrypted run %.1f s (target 600 s)", t);
        return Outcome{same && enc_log.rows.size() == 1000 && t < 600, os.str()};
    });

    report(9, "stabilization: |theta1|, |theta2| < 0.01 for t > 5 s", [&] {
        LoopConfig fc;
        fc.mode = LoopMode::Float;
        const TraceLog fl = run_closed_loop(fc);
        const double pf = late_peak(fl, 5.0);
        if (!enc_ok)
            return Outcome{false, "encrypted run unavailable; float peak " + fmt("%.3g", pf)};
        const double pe = late_peak(enc_log, 5.0);
        return Outcome{pe < 0.01 && pf < 0.01,
                       fmt("late peak encrypted %.3g rad, double-precision %.3g rad", pe, pf)};
    });

    report(10, "encrypted controller step time (reported, not asserted)", [&] {
        if (!enc_ok || enc_log.controller.empty())
            return Outcome{true, "no encrypted run to report"};
        double sum = 0, worst = 0;
        for (const auto& s : enc_log.controller) {
            sum += static_cast<double>(s.wall_ns);
            worst = std::max(worst, static_cast<double>(s.wall_ns));
        }
        const double mean_ms = sum / static_cast<double>(enc_log.controller.size()) / 1e6;
        return Outcome{true, fmt("mean %.2f ms, max %.2f ms per step over %.0f steps",
                                 mean_ms, worst / 1e6, double(enc_log.controller.size()))};
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
