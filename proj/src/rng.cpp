#include "rcfhe/rng.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace rcfhe {

namespace {

void ensure_sodium()
{
    static const int status = sodium_init();
    if (status < 0)
        throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

Rng::Rng(std::uint64_t seed)
{
    ensure_sodium();
    unsigned char seed_bytes[8];
    for (int i = 0; i < 8; ++i)
        seed_bytes[i] = static_cast<unsigned char>(seed >> (8 * i));
    static constexpr char kContext[] = "rcfhe-rng-v1";
    crypto_generichash(key_.data(), key_.size(), seed_bytes, sizeof seed_bytes,
                       reinterpret_cast<const unsigned char*>(kContext), sizeof kContext - 1);
}

void Rng::refill()
{
    static_assert(sizeof(buffer_) % 64 == 0);
    unsigned char bytes[sizeof(buffer_)] = {};
    unsigned char nonce[crypto_stream_chacha20_NONCEBYTES] = {};
    crypto_stream_chacha20_xor_ic(bytes, bytes, sizeof bytes, nonce, block_, key_.data());
    block_ += sizeof bytes / 64;
    for (std::size_t i = 0; i < buffer_.size(); ++i) {
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b)
            v |= std::uint64_t{bytes[8 * i + b]} << (8 * b);
        buffer_[i] = v;
    }
    pos_ = 0;
}

Rng::result_type Rng::operator()()
{
    if (pos_ == buffer_.size())
        refill();
    return buffer_[pos_++];
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi)
{
    if (lo > hi)
        throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == max())
        return static_cast<std::int64_t>((*this)());
    const std::uint64_t range = span + 1;
    // Reject the top partial bucket.
    const std::uint64_t limit = max() - max() % range;
    std::uint64_t v;
    do {
        v = (*this)();
    } while (v >= limit);
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + v % range);
}

double Rng::uniform_real() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

}  // namespace rcfhe
