#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rcfhe {

/// Machine word holding one element of Z_q with q = 2^ell, ell <= 64.
using Word = std::uint64_t;

constexpr Word word_mask(unsigned ell)
{
    return ell >= 64 ? ~Word{0} : (Word{1} << ell) - 1;
}

/// (x)^ell: the ell least significant binary digits of x.
constexpr Word truncate(Word x, unsigned ell) { return x & word_mask(ell); }

/// Maps a word mod 2^ell to its representative in [-2^(ell-1), 2^(ell-1)).
constexpr std::int64_t centered(Word x, unsigned ell)
{
    x = truncate(x, ell);
    if (ell >= 64)
        return static_cast<std::int64_t>(x);
    const Word half = Word{1} << (ell - 1);
    return x < half ? static_cast<std::int64_t>(x)
                    : static_cast<std::int64_t>(x) - static_cast<std::int64_t>(Word{1} << ell);
}

/// Inverse of centered: two's-complement embedding of v into ell bits.
constexpr Word embed(std::int64_t v, unsigned ell)
{
    return truncate(static_cast<Word>(v), ell);
}

/// Dense row-major matrix of words.
class WordMatrix {
public:
    WordMatrix() = default;
    WordMatrix(std::size_t rows, std::size_t cols, Word fill = 0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Word& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    Word operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<Word> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const Word> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<Word> data() { return data_; }
    std::span<const Word> data() const { return data_; }

    bool operator==(const WordMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Word> data_;
};

WordMatrix truncate(const WordMatrix& x, unsigned ell);

/// Binary matrix packed in groups of `group_bits` columns per word, least
/// significant bit first. With group_bits = ell, each packed word of a row is
/// exactly the value whose bit expansion the group holds.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols, unsigned group_bits);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    unsigned group_bits() const { return group_bits_; }
    std::size_t groups() const { return groups_; }

    bool get(std::size_t r, std::size_t c) const
    {
        return (words_[r * groups_ + c / group_bits_] >> (c % group_bits_)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v);

    Word group(std::size_t r, std::size_t g) const { return words_[r * groups_ + g]; }
    std::span<const Word> row_groups(std::size_t r) const
    {
        return {words_.data() + r * groups_, groups_};
    }
    std::span<Word> row_groups(std::size_t r) { return {words_.data() + r * groups_, groups_}; }
    std::span<const Word> packed() const { return words_; }

    bool operator==(const BitMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    unsigned group_bits_ = 64;
    std::size_t groups_ = 0;
    std::vector<Word> words_;
};

}  // namespace rcfhe
