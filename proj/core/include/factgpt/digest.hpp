#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace factgpt {

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's contents. Throws IoFailure if unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// FNV-1a 64-bit. Stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace factgpt
