#include "rcfhe/serialize.hpp"

namespace rcfhe {

void ByteWriter::u32(std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteReader::need(std::size_t n) const
{
    if (remaining() < n)
        throw MalformedFrame("unexpected end of data");
}

std::uint8_t ByteReader::u8()
{
    need(1);
    return bytes_[pos_++];
}

std::uint32_t ByteReader::u32()
{
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= std::uint32_t{bytes_[pos_++]} << (8 * i);
    return v;
}

std::uint64_t ByteReader::u64()
{
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return v;
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n)
{
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
}

void write_params_block(ByteWriter& w, const Params& p)
{
    w.u32(p.n);
    w.u32(p.m);
    w.u32(p.ell);
    w.u32(p.m_q);
    w.u32(p.n_q);
    w.u32(p.noise_bound);
}

Params read_params_block(ByteReader& r)
{
    const auto n = r.u32();
    const auto m = r.u32();
    const auto ell = r.u32();
    const auto m_q = r.u32();
    const auto n_q = r.u32();
    const auto noise_bound = r.u32();
    return make_params(n, m, ell, m_q, n_q, noise_bound);
}

}  // namespace rcfhe
