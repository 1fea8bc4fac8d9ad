#include "finsim/digest.hpp"
#include "finsim/errors.hpp"

#include <openssl/evp.h>

namespace finsim {

Digest sha256(std::span<const std::uint8_t> data) {
    Digest out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.bytes.size()) {
        throw InvariantViolation("sha256: digest computation failed");
    }
    return out;
}

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
} // namespace

std::string to_hex(std::span<const std::uint8_t> data) {
    std::string s;
    s.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        s.push_back(kHexDigits[b >> 4]);
        s.push_back(kHexDigits[b & 0x0F]);
    }
    return s;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw ConfigError("hex string has odd length");
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_nibble(hex[2 * i]);
        int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw ConfigError("invalid hex digit in: " + hex);
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

std::string Digest::hex() const {
    return to_hex(bytes);
}

Digest Digest::from_hex(const std::string& hex) {
    auto raw = finsim::from_hex(hex);
    if (raw.size() != 32) throw ConfigError("digest hex must be 64 characters");
    Digest d;
    std::copy(raw.begin(), raw.end(), d.bytes.begin());
    return d;
}

} // namespace finsim
