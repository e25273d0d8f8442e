#pragma once

#include <stdexcept>

#include "rcfhe/params.hpp"
#include "rcfhe/word.hpp"

namespace rcfhe {

class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Q(m_q, n_q) numbers embedded sign-extended in ell-bit words.
/// Representable values: [-2^(m_q-1), 2^(m_q-1)) in steps of 2^-n_q.
struct QFormat {
    unsigned m_q = 0;
    unsigned n_q = 0;
    unsigned ell = 0;

    double lower() const;
    double upper() const;  // exclusive
};

QFormat qformat_of(const Params& p);

/// A word plus the number of fraction bits it currently carries
/// (n_q normally, 2*n_q straight after a product).
struct QNumber {
    Word word = 0;
    unsigned frac_bits = 0;
};

/// round-half-away(beta * 2^n_q) mod 2^ell. Throws OutOfRange outside the format.
Word q_encode(double beta, const QFormat& fmt);

/// centered(word) / 2^frac_bits.
double q_decode(Word word, unsigned frac_bits, unsigned ell);
inline double q_decode(const QNumber& q, unsigned ell) { return q_decode(q.word, q.frac_bits, ell); }

/// Arithmetic right shift of the centered value (floor), re-embedded.
Word rescale(Word word, unsigned shift, unsigned ell);

inline Word q_mul_plain(Word a, Word b, unsigned ell) { return truncate(a * b, ell); }
inline Word q_add_plain(Word a, Word b, unsigned ell) { return truncate(a + b, ell); }

}  // namespace rcfhe
