#pragma once

#include <span>
#include <vector>

#include "rcfhe/counters.hpp"
#include "rcfhe/gsw.hpp"

namespace rcfhe {

/// Row-major grid of values (a matrix of ciphers).
template <class T>
struct Grid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> cells;

    Grid() = default;
    Grid(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c) {}

    T& at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
    const T& at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
};

// Reduced-cipher operations. None of them multiplies two words.

/// (Ct1 + Ct2)^ell.
ReducedCipher add(const ReducedCipher& a, const ReducedCipher& b);

/// (C1 * Ct2)^ell: row i sums the rows j of Ct2 with C1[i][j] = 1.
/// Noise of the result scales with the plaintext of `b`, so the signal
/// belongs on the right.
ReducedCipher mul(const Cipher& a, const ReducedCipher& b);

/// ([alpha G]^ell * Ct)^ell using the block-diagonal structure.
ReducedCipher scalar_mul(Word alpha, const ReducedCipher& ct);

/// (alpha G + Ct)^ell: touches one entry per row.
ReducedCipher scalar_add(Word alpha, const ReducedCipher& ct);

/// [alpha, alpha<<1, ..., alpha<<(ell-1)], each truncated to ell bits.
std::vector<Word> alpha_g(Word alpha, unsigned ell);

/// result[i] = sum_j mul(a[i][j], x[j]).
std::vector<ReducedCipher> enc_mat_vec(const Grid<Cipher>& a, std::span<const ReducedCipher> x);

// Full-cipher operations, literal Flatten formulas (reference path).

Cipher add_full(const Cipher& a, const Cipher& b);
Cipher mul_full(const Cipher& a, const Cipher& b);
/// Flatten(Flatten(alpha I_N) * C).
Cipher scalar_mul_full(Word alpha, const Cipher& c);
/// Flatten(alpha I_N + C).
Cipher scalar_add_full(Word alpha, const Cipher& c);

}  // namespace rcfhe
