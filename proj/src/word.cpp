#include "rcfhe/word.hpp"

#include <stdexcept>

namespace rcfhe {

WordMatrix truncate(const WordMatrix& x, unsigned ell)
{
    WordMatrix out(x.rows(), x.cols());
    auto src = x.data();
    auto dst = out.data();
    const Word mask = word_mask(ell);
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = src[i] & mask;
    return out;
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols, unsigned group_bits)
    : rows_(rows), cols_(cols), group_bits_(group_bits)
{
    if (group_bits == 0 || group_bits > 64)
        throw std::invalid_argument("BitMatrix: group width must be in [1, 64]");
    groups_ = (cols + group_bits - 1) / group_bits;
    words_.assign(rows * groups_, 0);
}

void BitMatrix::set(std::size_t r, std::size_t c, bool v)
{
    Word& w = words_[r * groups_ + c / group_bits_];
    const Word bit = Word{1} << (c % group_bits_);
    w = v ? (w | bit) : (w & ~bit);
}

}  // namespace rcfhe
