#include "rcfhe/keys.hpp"

#include <sodium.h>

#include <cstdio>
#include <istream>
#include <iterator>
#include <ostream>

#include "rcfhe/counters.hpp"
#include "rcfhe/serialize.hpp"

namespace rcfhe {

namespace {

constexpr char kKeyMagic[4] = {'R', 'C', 'K', 'Y'};
constexpr std::uint8_t kKeyVersion = 1;

std::vector<std::uint8_t> key_bytes(const KeyPair& keys)
{
    ByteWriter w;
    for (char c : kKeyMagic)
        w.u8(static_cast<std::uint8_t>(c));
    w.u8(kKeyVersion);
    write_params_block(w, keys.secret.params);
    for (Word v : keys.secret.s)
        w.u64(v);
    for (Word v : keys.pub.A.data())
        w.u64(v);
    return w.take();
}

}  // namespace

std::vector<Word> sample_noise(const Params& params, Rng& rng)
{
    const auto bound = static_cast<std::int64_t>(params.noise_bound);
    std::vector<Word> e(params.m);
    for (auto& v : e)
        v = embed(rng.uniform_int(-bound, bound), params.ell);
    return e;
}

KeyPair assemble_keys(const Params& params, std::span<const Word> t, const WordMatrix& B,
                      std::span<const Word> e)
{
    const unsigned ell = params.ell;
    if (t.size() != params.n || B.rows() != params.m || B.cols() != params.n ||
        e.size() != params.m)
        throw InvalidParams("key material does not match params");

    KeyPair keys;
    keys.secret.params = params;
    keys.secret.s.resize(params.width());
    keys.secret.s[0] = 1;
    for (std::size_t i = 0; i < params.n; ++i)
        keys.secret.s[i + 1] = truncate(Word{0} - t[i], ell);

    keys.pub.params = params;
    keys.pub.A = WordMatrix(params.m, params.width());
    for (std::size_t r = 0; r < params.m; ++r) {
        Word b = e[r];
        for (std::size_t c = 0; c < params.n; ++c) {
            b += B(r, c) * t[c];
            keys.pub.A(r, c + 1) = truncate(B(r, c), ell);
        }
        keys.pub.A(r, 0) = truncate(b, ell);
    }
    detail::tally_mults(std::uint64_t{params.m} * params.n);
    detail::tally_adds(std::uint64_t{params.m} * params.n);
    return keys;
}

KeyPair keygen(const Params& params, Rng& rng)
{
    const unsigned ell = params.ell;
    std::vector<Word> t(params.n);
    for (auto& v : t)
        v = truncate(rng(), ell);
    WordMatrix B(params.m, params.n);
    for (auto& v : B.data())
        v = truncate(rng(), ell);
    const auto e = sample_noise(params, rng);
    return assemble_keys(params, t, B, e);
}

void write_key_file(std::ostream& os, const KeyPair& keys)
{
    const auto bytes = key_bytes(keys);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

KeyPair read_key_file(std::istream& is)
{
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(is),
                                    std::istreambuf_iterator<char>()};
    ByteReader r(bytes);
    for (char c : kKeyMagic)
        if (r.u8() != static_cast<std::uint8_t>(c))
            throw MalformedFrame("key file: bad magic");
    if (r.u8() != kKeyVersion)
        throw MalformedFrame("key file: unsupported version");
    const Params p = read_params_block(r);

    KeyPair keys;
    keys.secret.params = p;
    keys.secret.s.resize(p.width());
    for (auto& v : keys.secret.s)
        v = r.u64();
    keys.pub.params = p;
    keys.pub.A = WordMatrix(p.m, p.width());
    for (auto& v : keys.pub.A.data())
        v = r.u64();
    if (!r.done())
        throw MalformedFrame("key file: trailing bytes");
    return keys;
}

std::string fingerprint(const KeyPair& keys)
{
    const auto bytes = key_bytes(keys);
    if (sodium_init() < 0)
        throw std::runtime_error("libsodium initialisation failed");
    unsigned char digest[crypto_generichash_BYTES_MIN];
    crypto_generichash(digest, sizeof digest, bytes.data(), bytes.size(), nullptr, 0);
    std::string hex;
    char buf[3];
    for (unsigned char d : digest) {
        std::snprintf(buf, sizeof buf, "%02x", d);
        hex += buf;
    }
    return hex;
}

}  // namespace rcfhe
