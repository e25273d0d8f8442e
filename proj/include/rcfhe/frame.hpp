#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rcfhe/serialize.hpp"

namespace rcfhe {

enum class MsgType : std::uint8_t {
    HelloParams = 0,
    EncGains = 1,
    EncSignalsToCtrl = 2,
    EncResultsToAdapter = 3,
    Shutdown = 4,
};

const char* to_string(MsgType t);

struct Frame {
    MsgType type = MsgType::Shutdown;
    std::vector<std::uint8_t> payload;

    bool operator==(const Frame&) const = default;
};

inline constexpr std::array<std::uint8_t, 4> frame_magic{'R', 'C', 'F', 'R'};
inline constexpr std::size_t frame_header_size = 9;
inline constexpr std::uint32_t max_frame_payload = 64u << 20;

/// magic, type byte, u32 LE payload length, payload.
std::vector<std::uint8_t> encode_frame(const Frame& f);

struct FrameHeader {
    MsgType type;
    std::uint32_t length;
};

FrameHeader decode_header(std::span<const std::uint8_t> header);

/// Parses exactly one frame; trailing or missing bytes are errors.
Frame decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace rcfhe
