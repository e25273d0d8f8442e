#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rcfhe/keys.hpp"
#include "rcfhe/params.hpp"
#include "rcfhe/rng.hpp"
#include "rcfhe/serialize.hpp"
#include "rcfhe/word.hpp"

namespace rcfhe {

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// N x N binary cipher, stored as N rows of (n+1) packed ell-bit groups.
class Cipher {
public:
    Cipher() = default;
    explicit Cipher(BitMatrix bits);

    std::size_t size() const { return bits_.rows(); }
    unsigned ell() const { return bits_.group_bits(); }
    std::size_t blocks() const { return bits_.groups(); }
    const BitMatrix& bits() const { return bits_; }

    bool operator==(const Cipher&) const = default;

private:
    BitMatrix bits_;
};

/// N x (n+1) word matrix C*G_{n+1}; entries < 2^ell.
class ReducedCipher {
public:
    ReducedCipher() = default;
    ReducedCipher(WordMatrix words, unsigned ell);

    std::size_t rows() const { return words_.rows(); }
    std::size_t cols() const { return words_.cols(); }
    unsigned ell() const { return ell_; }
    const WordMatrix& words() const { return words_; }

    bool operator==(const ReducedCipher&) const = default;

private:
    WordMatrix words_;
    unsigned ell_ = 0;
};

// Definition-1 primitives ---------------------------------------------------

/// [a]^ell: each word column expands to ell bit columns, LSB first.
BitMatrix bit_decomp(const WordMatrix& a, unsigned ell);

/// b * G: each ell-bit group collapses to one word.
WordMatrix bit_decomp_inv(const BitMatrix& b);

/// [b * G]^ell for a word matrix whose width is a multiple of ell.
BitMatrix flatten(const WordMatrix& b, unsigned ell);

/// c * G^T: entry i*ell + j is c[i] * 2^j mod 2^ell, by shifts.
std::vector<Word> powers_of_2(std::span<const Word> c, unsigned ell);

// Encryption / decryption ----------------------------------------------------

/// Binary N x m mask; each row is uniform over the nonzero rows.
BitMatrix sample_mask(const Params& params, Rng& rng);

/// (mu*G + R*A)^ell with fresh R.
ReducedCipher encrypt(const PublicKey& pk, Word mu, Rng& rng);
ReducedCipher encrypt_with_mask(const PublicKey& pk, Word mu, const BitMatrix& R);

/// Flatten(mu*I_N + BitDecomp(R*A)), evaluated literally.
Cipher encrypt_full(const PublicKey& pk, Word mu, Rng& rng);
Cipher encrypt_full_with_mask(const PublicKey& pk, Word mu, const BitMatrix& R);

ReducedCipher to_reduced(const Cipher& c);
Cipher to_full(const ReducedCipher& ct);

/// Bit-serial message recovery from v[i] = mu*2^i + e_i, i < ell.
Word mp_dec(std::span<const Word> v, unsigned ell);

Word decrypt(const SecretKey& sk, const ReducedCipher& ct);

/// max_{i<ell} |centered((Ct*s)_i - mu*2^i)|.
std::uint64_t noise_of(const SecretKey& sk, const ReducedCipher& ct, Word mu);

/// (Ct*s)_r - mu*(G s)_r for every row r, centered.
std::vector<std::int64_t> noise_vector(const SecretKey& sk, const ReducedCipher& ct, Word mu);

// Wire format -----------------------------------------------------------------

/// (N, n+1) as u32, then every word row-major as u64.
void write_reduced(ByteWriter& w, const ReducedCipher& ct);
ReducedCipher read_reduced(ByteReader& r, const Params& expected);

// Literal matrix-product path, used only as the reference for equivalence
// checks. Materializes G and multiplies densely; every product is counted.
namespace reference {

/// G_{blocks} = I_blocks (x) g, dense (blocks*ell) x blocks.
WordMatrix gadget(std::size_t blocks, unsigned ell);

/// Dense product mod 2^64; counts rows*inner*cols multiplications.
WordMatrix matmul(const WordMatrix& a, const WordMatrix& b);

/// Element-wise sum mod 2^64.
WordMatrix add(const WordMatrix& a, const WordMatrix& b);

/// One word per bit, LSB first, for every entry: [x]^ell densely.
WordMatrix bits_of(const WordMatrix& x, unsigned ell);

/// Unpacks a bit matrix into one 0/1 word per entry.
WordMatrix unpack(const BitMatrix& b);

/// Packs a dense 0/1 matrix into ell-bit groups.
BitMatrix pack(const WordMatrix& bits, unsigned ell);

/// [b * G]^ell via the materialized gadget matrix.
BitMatrix flatten(const WordMatrix& b, unsigned ell);

}  // namespace reference

}  // namespace rcfhe
