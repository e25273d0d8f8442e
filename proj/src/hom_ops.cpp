#include "rcfhe/hom_ops.hpp"

#include <bit>

namespace rcfhe {

namespace {

void require_same_shape(const ReducedCipher& a, const ReducedCipher& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.ell() != b.ell())
        throw DimensionMismatch("reduced ciphers differ in shape");
}

void require_compatible(const Cipher& a, const ReducedCipher& b)
{
    if (a.size() != b.rows() || a.ell() != b.ell())
        throw DimensionMismatch("cipher and reduced cipher differ in shape");
}

void require_same_shape(const Cipher& a, const Cipher& b)
{
    if (a.size() != b.size() || a.ell() != b.ell())
        throw DimensionMismatch("ciphers differ in shape");
}

// dst += sum of rows of `src` selected by the set bits of `select`, where
// bit k of select[g] stands for row g*ell + k.
std::uint64_t masked_row_sum(std::span<Word> dst, std::span<const Word> select,
                             const WordMatrix& src, unsigned ell)
{
    const std::size_t width = dst.size();
    std::uint64_t picked = 0;
    for (std::size_t g = 0; g < select.size(); ++g) {
        Word bits = select[g];
        while (bits != 0) {
            const unsigned k = static_cast<unsigned>(std::countr_zero(bits));
            bits &= bits - 1;
            const Word* row = src.row(g * ell + k).data();
            for (std::size_t c = 0; c < width; ++c)
                dst[c] += row[c];
            ++picked;
        }
    }
    return picked;
}

WordMatrix dense_with_diagonal(const Cipher& c, Word alpha)
{
    WordMatrix d = reference::unpack(c.bits());
    for (std::size_t i = 0; i < d.rows(); ++i)
        d(i, i) += alpha;
    detail::tally_adds(d.rows());
    return d;
}

}  // namespace

ReducedCipher add(const ReducedCipher& a, const ReducedCipher& b)
{
    require_same_shape(a, b);
    const Word mask = word_mask(a.ell());
    WordMatrix out(a.rows(), a.cols());
    auto x = a.words().data();
    auto y = b.words().data();
    auto z = out.data();
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = (x[i] + y[i]) & mask;
    detail::tally_adds(z.size());
    return ReducedCipher(std::move(out), a.ell());
}

ReducedCipher mul(const Cipher& a, const ReducedCipher& b)
{
    require_compatible(a, b);
    const unsigned ell = b.ell();
    const Word mask = word_mask(ell);
    WordMatrix out(b.rows(), b.cols());
    std::uint64_t picked = 0;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto dst = out.row(i);
        picked += masked_row_sum(dst, a.bits().row_groups(i), b.words(), ell);
        for (auto& v : dst)
            v &= mask;
    }
    detail::tally_bits(std::uint64_t{a.size()} * a.size());
    detail::tally_adds(picked * b.cols());
    return ReducedCipher(std::move(out), ell);
}

std::vector<Word> alpha_g(Word alpha, unsigned ell)
{
    std::vector<Word> out(ell);
    const Word mask = word_mask(ell);
    Word v = alpha & mask;
    out[0] = v;
    for (unsigned j = 1; j < ell; ++j) {
        v = (v << 1) & mask;
        out[j] = v;
    }
    detail::tally_bits(ell - 1);
    return out;
}

ReducedCipher scalar_mul(Word alpha, const ReducedCipher& ct)
{
    const unsigned ell = ct.ell();
    const Word mask = word_mask(ell);
    const auto ag = alpha_g(alpha, ell);
    WordMatrix out(ct.rows(), ct.cols());
    std::uint64_t picked = 0;
    // Block b of [alpha G]^ell is the ell x ell bit matrix whose row j is
    // the expansion of ag[j]; it only reaches rows b*ell .. b*ell+ell-1.
    for (std::size_t b = 0; b < ct.cols(); ++b) {
        for (unsigned j = 0; j < ell; ++j) {
            const std::size_t row = b * ell + j;
            auto dst = out.row(row);
            Word bits = ag[j];
            while (bits != 0) {
                const unsigned k = static_cast<unsigned>(std::countr_zero(bits));
                bits &= bits - 1;
                const Word* src = ct.words().row(b * ell + k).data();
                for (std::size_t c = 0; c < dst.size(); ++c)
                    dst[c] += src[c];
                ++picked;
            }
            for (auto& v : dst)
                v &= mask;
        }
    }
    detail::tally_bits(std::uint64_t{ct.rows()} * ell);
    detail::tally_adds(picked * ct.cols());
    return ReducedCipher(std::move(out), ell);
}

ReducedCipher scalar_add(Word alpha, const ReducedCipher& ct)
{
    const unsigned ell = ct.ell();
    const Word mask = word_mask(ell);
    const auto ag = alpha_g(alpha, ell);
    WordMatrix out = ct.words();
    for (std::size_t i = 0; i < ct.cols(); ++i)
        for (unsigned j = 0; j < ell; ++j)
            out(i * ell + j, i) = (out(i * ell + j, i) + ag[j]) & mask;
    detail::tally_adds(ct.rows());
    return ReducedCipher(std::move(out), ell);
}

std::vector<ReducedCipher> enc_mat_vec(const Grid<Cipher>& a, std::span<const ReducedCipher> x)
{
    if (a.cols != x.size())
        throw DimensionMismatch("enc_mat_vec: inner dimensions differ");
    if (a.cols == 0)
        throw DimensionMismatch("enc_mat_vec: empty operand");
    std::vector<ReducedCipher> out;
    out.reserve(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        ReducedCipher acc = mul(a.at(i, 0), x[0]);
        for (std::size_t j = 1; j < a.cols; ++j)
            acc = add(acc, mul(a.at(i, j), x[j]));
        out.push_back(std::move(acc));
    }
    return out;
}

Cipher add_full(const Cipher& a, const Cipher& b)
{
    require_same_shape(a, b);
    const WordMatrix sum = reference::add(reference::unpack(a.bits()), reference::unpack(b.bits()));
    return Cipher(reference::flatten(sum, a.ell()));
}

Cipher mul_full(const Cipher& a, const Cipher& b)
{
    require_same_shape(a, b);
    const WordMatrix prod =
        reference::matmul(reference::unpack(a.bits()), reference::unpack(b.bits()));
    return Cipher(reference::flatten(prod, a.ell()));
}

Cipher scalar_mul_full(Word alpha, const Cipher& c)
{
    const unsigned ell = c.ell();
    WordMatrix alpha_identity(c.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        alpha_identity(i, i) = alpha;
    const BitMatrix inner = reference::flatten(alpha_identity, ell);
    const WordMatrix prod = reference::matmul(reference::unpack(inner), reference::unpack(c.bits()));
    return Cipher(reference::flatten(prod, ell));
}

Cipher scalar_add_full(Word alpha, const Cipher& c)
{
    return Cipher(reference::flatten(dense_with_diagonal(c, alpha), c.ell()));
}

}  // namespace rcfhe
