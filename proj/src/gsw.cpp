#include "rcfhe/gsw.hpp"

#include <bit>

#include "rcfhe/counters.hpp"

namespace rcfhe {

Cipher::Cipher(BitMatrix bits) : bits_(std::move(bits))
{
    if (bits_.rows() != bits_.cols() || bits_.cols() % bits_.group_bits() != 0)
        throw DimensionMismatch("cipher must be N x N with N a multiple of ell");
}

ReducedCipher::ReducedCipher(WordMatrix words, unsigned ell) : words_(std::move(words)), ell_(ell)
{
    if (words_.rows() != words_.cols() * ell)
        throw DimensionMismatch("reduced cipher must be (n+1)*ell x (n+1)");
    const Word mask = word_mask(ell);
    for (Word v : words_.data())
        if ((v & ~mask) != 0)
            throw std::invalid_argument("reduced cipher entry exceeds ell bits");
}

BitMatrix bit_decomp(const WordMatrix& a, unsigned ell)
{
    BitMatrix out(a.rows(), a.cols() * ell, ell);
    const Word mask = word_mask(ell);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto dst = out.row_groups(r);
        auto src = a.row(r);
        for (std::size_t c = 0; c < src.size(); ++c)
            dst[c] = src[c] & mask;
    }
    detail::tally_bits(a.rows() * a.cols());
    return out;
}

WordMatrix bit_decomp_inv(const BitMatrix& b)
{
    if (b.cols() % b.group_bits() != 0)
        throw DimensionMismatch("bit_decomp_inv: width is not a multiple of ell");
    WordMatrix out(b.rows(), b.groups());
    for (std::size_t r = 0; r < b.rows(); ++r) {
        auto src = b.row_groups(r);
        auto dst = out.row(r);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

BitMatrix flatten(const WordMatrix& b, unsigned ell)
{
    if (b.cols() % ell != 0)
        throw DimensionMismatch("flatten: width is not a multiple of ell");
    const std::size_t groups = b.cols() / ell;
    const Word mask = word_mask(ell);
    BitMatrix out(b.rows(), b.cols(), ell);
    for (std::size_t r = 0; r < b.rows(); ++r) {
        auto src = b.row(r);
        auto dst = out.row_groups(r);
        for (std::size_t g = 0; g < groups; ++g) {
            Word acc = 0;
            for (unsigned j = 0; j < ell; ++j)
                acc += src[g * ell + j] << j;
            dst[g] = acc & mask;
        }
    }
    detail::tally_bits(b.rows() * b.cols());
    detail::tally_adds(b.rows() * groups * (ell - 1));
    return out;
}

std::vector<Word> powers_of_2(std::span<const Word> c, unsigned ell)
{
    std::vector<Word> out(c.size() * ell);
    const Word mask = word_mask(ell);
    for (std::size_t i = 0; i < c.size(); ++i) {
        Word v = c[i] & mask;
        for (unsigned j = 0; j < ell; ++j) {
            out[i * ell + j] = v;
            v = (v << 1) & mask;
        }
    }
    detail::tally_bits(c.size() * (ell - 1));
    return out;
}

BitMatrix sample_mask(const Params& params, Rng& rng)
{
    BitMatrix R(params.N, params.m, 64);
    for (std::size_t r = 0; r < R.rows(); ++r) {
        auto groups = R.row_groups(r);
        // A zero row would put mu * 2^k into the cipher in the clear.
        bool zero = true;
        while (zero) {
            std::size_t left = params.m;
            zero = true;
            for (auto& g : groups) {
                const unsigned take = left >= 64 ? 64 : static_cast<unsigned>(left);
                g = rng() & word_mask(take);
                zero = zero && g == 0;
                left -= take;
            }
        }
    }
    return R;
}

ReducedCipher encrypt_with_mask(const PublicKey& pk, Word mu, const BitMatrix& R)
{
    const Params& p = pk.params;
    if (R.rows() != p.N || R.cols() != p.m)
        throw DimensionMismatch("encrypt: mask must be N x m");
    const unsigned ell = p.ell;
    const std::size_t width = p.width();
    const Word mask = p.mask();

    WordMatrix words(p.N, width);
    std::uint64_t selected = 0;
    for (std::size_t r = 0; r < p.N; ++r) {
        auto acc = words.row(r);
        for (std::size_t k = 0; k < p.m; ++k) {
            if (!R.get(r, k))
                continue;
            auto a = pk.A.row(k);
            for (std::size_t c = 0; c < width; ++c)
                acc[c] += a[c];
            ++selected;
        }
    }
    // mu*G: block i holds mu, mu<<1, ..., mu<<(ell-1) in column i.
    for (std::size_t i = 0; i < width; ++i) {
        Word shifted = mu & mask;
        for (unsigned j = 0; j < ell; ++j) {
            words(i * ell + j, i) += shifted;
            shifted <<= 1;
        }
    }
    for (auto& v : words.data())
        v &= mask;

    detail::tally_bits(std::uint64_t{p.N} * p.m + width * (ell - 1));
    detail::tally_adds(selected * width + p.N);
    return ReducedCipher(std::move(words), ell);
}

ReducedCipher encrypt(const PublicKey& pk, Word mu, Rng& rng)
{
    return encrypt_with_mask(pk, mu, sample_mask(pk.params, rng));
}

Cipher encrypt_full_with_mask(const PublicKey& pk, Word mu, const BitMatrix& R)
{
    const Params& p = pk.params;
    if (R.rows() != p.N || R.cols() != p.m)
        throw DimensionMismatch("encrypt_full: mask must be N x m");
    const WordMatrix ra = truncate(reference::matmul(reference::unpack(R), pk.A), p.ell);
    WordMatrix m = reference::bits_of(ra, p.ell);
    for (std::size_t i = 0; i < p.N; ++i)
        m(i, i) += mu;
    detail::tally_adds(p.N);
    return Cipher(reference::flatten(m, p.ell));
}

Cipher encrypt_full(const PublicKey& pk, Word mu, Rng& rng)
{
    return encrypt_full_with_mask(pk, mu, sample_mask(pk.params, rng));
}

ReducedCipher to_reduced(const Cipher& c) { return ReducedCipher(bit_decomp_inv(c.bits()), c.ell()); }

Cipher to_full(const ReducedCipher& ct) { return Cipher(bit_decomp(ct.words(), ct.ell())); }

Word mp_dec(std::span<const Word> v, unsigned ell)
{
    if (v.size() < ell)
        throw DimensionMismatch("mp_dec: needs ell entries");
    const Word mask = word_mask(ell);
    const Word quarter = Word{1} << (ell - 2);
    const Word three_quarters = 3 * quarter;
    Word mu = 0;
    for (unsigned i = 0; i < ell; ++i) {
        // v[ell-1-i] = mu*2^(ell-1-i) + e; the bits below i are already known.
        const Word known = (mu << (ell - 1 - i)) & mask;
        const Word r = (v[ell - 1 - i] - known) & mask;
        if (r >= quarter && r < three_quarters)
            mu |= Word{1} << i;
    }
    return mu;
}

namespace {

Word row_dot(std::span<const Word> row, std::span<const Word> s, unsigned ell)
{
    Word acc = 0;
    for (std::size_t c = 0; c < row.size(); ++c)
        acc += row[c] * s[c];
    return truncate(acc, ell);
}

void check_key(const SecretKey& sk, const ReducedCipher& ct)
{
    if (ct.cols() != sk.s.size() || ct.ell() != sk.params.ell)
        throw DimensionMismatch("cipher does not match the secret key geometry");
}

}  // namespace

Word decrypt(const SecretKey& sk, const ReducedCipher& ct)
{
    check_key(sk, ct);
    const unsigned ell = ct.ell();
    std::vector<Word> w(ell);
    for (unsigned i = 0; i < ell; ++i)
        w[i] = row_dot(ct.words().row(i), sk.s, ell);
    detail::tally_mults(std::uint64_t{ell} * ct.cols());
    detail::tally_adds(std::uint64_t{ell} * (ct.cols() - 1));
    return mp_dec(w, ell);
}

std::vector<std::int64_t> noise_vector(const SecretKey& sk, const ReducedCipher& ct, Word mu)
{
    check_key(sk, ct);
    const unsigned ell = ct.ell();
    const auto gs = powers_of_2(sk.s, ell);
    std::vector<std::int64_t> out(ct.rows());
    for (std::size_t r = 0; r < ct.rows(); ++r) {
        const Word w = row_dot(ct.words().row(r), sk.s, ell);
        out[r] = centered(w - mu * gs[r], ell);
    }
    return out;
}

std::uint64_t noise_of(const SecretKey& sk, const ReducedCipher& ct, Word mu)
{
    check_key(sk, ct);
    const unsigned ell = ct.ell();
    std::uint64_t worst = 0;
    for (unsigned i = 0; i < ell; ++i) {
        const Word w = row_dot(ct.words().row(i), sk.s, ell);
        const std::int64_t e = centered(w - (mu << i), ell);
        const std::uint64_t mag = e < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(e)
                                        : static_cast<std::uint64_t>(e);
        worst = std::max(worst, mag);
    }
    return worst;
}

void write_reduced(ByteWriter& w, const ReducedCipher& ct)
{
    w.u32(static_cast<std::uint32_t>(ct.rows()));
    w.u32(static_cast<std::uint32_t>(ct.cols()));
    for (Word v : ct.words().data())
        w.u64(v);
}

ReducedCipher read_reduced(ByteReader& r, const Params& expected)
{
    const auto rows = r.u32();
    const auto cols = r.u32();
    if (rows != expected.N || cols != expected.width())
        throw MalformedFrame("cipher dimensions do not match params");
    WordMatrix words(rows, cols);
    const Word mask = expected.mask();
    for (auto& v : words.data()) {
        v = r.u64();
        if ((v & ~mask) != 0)
            throw MalformedFrame("cipher word exceeds ell bits");
    }
    return ReducedCipher(std::move(words), expected.ell);
}

namespace reference {

WordMatrix gadget(std::size_t blocks, unsigned ell)
{
    WordMatrix g(blocks * ell, blocks);
    for (std::size_t b = 0; b < blocks; ++b)
        for (unsigned j = 0; j < ell; ++j)
            g(b * ell + j, b) = Word{1} << j;
    return g;
}

WordMatrix matmul(const WordMatrix& a, const WordMatrix& b)
{
    if (a.cols() != b.rows())
        throw DimensionMismatch("matmul: inner dimensions differ");
    WordMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        auto ai = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Word aik = ai[k];
            auto bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                dst[j] += aik * bk[j];
        }
    }
    const std::uint64_t products = std::uint64_t{a.rows()} * a.cols() * b.cols();
    detail::tally_mults(products);
    detail::tally_adds(products - std::uint64_t{a.rows()} * b.cols());
    return out;
}

WordMatrix add(const WordMatrix& a, const WordMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("add: shapes differ");
    WordMatrix out(a.rows(), a.cols());
    auto x = a.data();
    auto y = b.data();
    auto z = out.data();
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = x[i] + y[i];
    detail::tally_adds(z.size());
    return out;
}

WordMatrix bits_of(const WordMatrix& x, unsigned ell)
{
    WordMatrix out(x.rows(), x.cols() * ell);
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c)
            for (unsigned j = 0; j < ell; ++j)
                out(r, c * ell + j) = (x(r, c) >> j) & 1u;
    detail::tally_bits(std::uint64_t{x.rows()} * x.cols() * ell);
    return out;
}

WordMatrix unpack(const BitMatrix& b)
{
    WordMatrix out(b.rows(), b.cols());
    for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c)
            out(r, c) = b.get(r, c) ? 1 : 0;
    return out;
}

BitMatrix pack(const WordMatrix& bits, unsigned ell)
{
    BitMatrix out(bits.rows(), bits.cols(), ell);
    for (std::size_t r = 0; r < bits.rows(); ++r)
        for (std::size_t c = 0; c < bits.cols(); ++c) {
            const Word v = bits(r, c);
            if (v > 1)
                throw std::invalid_argument("pack: entry is not binary");
            out.set(r, c, v == 1);
        }
    return out;
}

BitMatrix flatten(const WordMatrix& b, unsigned ell)
{
    if (b.cols() % ell != 0)
        throw DimensionMismatch("flatten: width is not a multiple of ell");
    const WordMatrix collapsed = truncate(matmul(b, gadget(b.cols() / ell, ell)), ell);
    return pack(bits_of(collapsed, ell), ell);
}

}  // namespace reference

}  // namespace rcfhe
