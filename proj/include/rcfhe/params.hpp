#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "rcfhe/word.hpp"

namespace rcfhe {

class InvalidParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Scheme geometry. q = 2^ell is implicit; N = (n+1)*ell rows per cipher.
///
/// Instances are only produced by make_params, which enforces:
///   - 2 <= ell <= 64
///   - m_q + 2*n_q <= ell  (a product of two Q numbers fits one word)
///   - m * noise_bound < 2^(ell-2)  (fresh ciphers decrypt)
struct Params {
    std::uint32_t n = 0;
    std::uint32_t m = 0;
    std::uint32_t ell = 0;
    std::uint32_t m_q = 0;
    std::uint32_t n_q = 0;
    std::uint32_t noise_bound = 0;
    std::uint32_t N = 0;

    /// Columns of a reduced cipher, n + 1.
    std::uint32_t width() const { return n + 1; }
    Word mask() const { return word_mask(ell); }

    bool operator==(const Params&) const = default;
};

Params make_params(std::uint32_t n, std::uint32_t m, std::uint32_t ell, std::uint32_t m_q,
                   std::uint32_t n_q, std::uint32_t noise_bound);

/// n=7, m=7, ell=64, Q10.22, noise bound 15.
Params default_params();

std::string describe(const Params& p);

}  // namespace rcfhe
