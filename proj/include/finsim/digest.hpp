#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace finsim {

// 32-byte content digest (SHA-256). Only equality and ordering matter here;
// the byte layout is fixed so golden files stay portable.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;

    std::string hex() const;
    static Digest from_hex(const std::string& hex);
};

Digest sha256(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> from_hex(const std::string& hex);

} // namespace finsim
