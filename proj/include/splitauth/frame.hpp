#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitauth/message.hpp"

namespace splitauth {

/// Frame cap; a declared length above this is rejected before allocation.
constexpr std::uint32_t kMaxFramePayload = 1u << 20; // 1 MiB

/// 4-byte big-endian payload length, then a compact JSON object whose first
/// member is "type". Throws MessageError if the message violates its schema.
std::vector<std::uint8_t> encode_frame(const Message& message);

enum class DecodeStatus {
    Ok,
    Incomplete, // need more bytes; nothing consumed
    Oversize,   // declared length above the cap; connection-fatal
    Malformed,  // bad JSON / unknown type / bad hex / wrong lengths; connection-fatal
};

struct DecodeResult {
    DecodeStatus status = DecodeStatus::Incomplete;
    std::optional<Message> message;
    std::size_t consumed = 0;
    std::string error;
};

/// Consumes exactly one frame when the buffer holds it entirely.
DecodeResult decode_frame(std::span<const std::uint8_t> buffer);

} // namespace splitauth
