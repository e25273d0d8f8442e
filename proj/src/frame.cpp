#include "rcfhe/frame.hpp"

#include <algorithm>
#include <string>

namespace rcfhe {

const char* to_string(MsgType t)
{
    switch (t) {
    case MsgType::HelloParams:
        return "HELLO_PARAMS";
    case MsgType::EncGains:
        return "ENC_GAINS";
    case MsgType::EncSignalsToCtrl:
        return "ENC_SIGNALS_TO_CTRL";
    case MsgType::EncResultsToAdapter:
        return "ENC_RESULTS_TO_ADAPTER";
    case MsgType::Shutdown:
        return "SHUTDOWN";
    }
    return "UNKNOWN";
}

std::vector<std::uint8_t> encode_frame(const Frame& f)
{
    if (f.payload.size() > max_frame_payload)
        throw MalformedFrame("payload too large");
    ByteWriter w;
    w.raw(frame_magic);
    w.u8(static_cast<std::uint8_t>(f.type));
    w.u32(static_cast<std::uint32_t>(f.payload.size()));
    w.raw(f.payload);
    return w.take();
}

FrameHeader decode_header(std::span<const std::uint8_t> header)
{
    ByteReader r(header.first(std::min(header.size(), frame_header_size)));
    const auto magic = r.raw(frame_magic.size());
    if (!std::equal(magic.begin(), magic.end(), frame_magic.begin()))
        throw MalformedFrame("bad frame magic");
    const std::uint8_t type = r.u8();
    if (type > static_cast<std::uint8_t>(MsgType::Shutdown))
        throw MalformedFrame("unknown message type " + std::to_string(type));
    const std::uint32_t length = r.u32();
    if (length > max_frame_payload)
        throw MalformedFrame("frame length exceeds limit");
    return {static_cast<MsgType>(type), length};
}

Frame decode_frame(std::span<const std::uint8_t> bytes)
{
    const FrameHeader h = decode_header(bytes);
    if (bytes.size() != frame_header_size + h.length)
        throw MalformedFrame("frame length does not match payload");
    const auto body = bytes.subspan(frame_header_size);
    return {h.type, {body.begin(), body.end()}};
}

}  // namespace rcfhe
