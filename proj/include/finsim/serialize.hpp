#pragma once

// Little-endian byte encoding helpers. All on-disk and hashed layouts in this
// project are fixed little-endian regardless of host byte order.

#include "finsim/errors.hpp"
#include "finsim/value.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace finsim {

class ByteWriter {
public:
    void put_u8(std::uint8_t v) { buf_.push_back(v); }

    void put_u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void put_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    // Value is 128-bit; 16 bytes little-endian.
    void put_value(const Value& v) {
        for (int i = 0; i < 16; ++i) {
            buf_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
        }
    }

    void put_bytes(std::span<const std::uint8_t> data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
    }

    const std::vector<std::uint8_t>& bytes() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t get_u8() {
        need(1);
        return data_[pos_++];
    }

    std::uint32_t get_u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
        return v;
    }

    std::uint64_t get_u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
        return v;
    }

    Value get_value() {
        need(16);
        Value v = 0;
        for (int i = 0; i < 16; ++i) {
            v |= Value(data_[pos_++]) << (8 * i);
        }
        return v;
    }

    std::vector<std::uint8_t> get_bytes(std::size_t n) {
        need(n);
        std::vector<std::uint8_t> out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                      data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }

    bool exhausted() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw DomainError("byte stream truncated");
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace finsim
