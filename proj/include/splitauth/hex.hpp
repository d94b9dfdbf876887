#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitauth {

/// Lowercase hex encoding; the only byte-string text form used on the wire
/// and in store files.
std::string to_hex(std::span<const std::uint8_t> bytes);

/// Strict decoder: requires even length and lowercase [0-9a-f] only.
/// Throws std::invalid_argument otherwise.
std::vector<std::uint8_t> from_hex(std::string_view hex);

bool is_lower_hex(std::string_view hex);

} // namespace splitauth
