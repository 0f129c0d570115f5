#pragma once

// MSB-first bit streams over byte buffers. The last byte is zero-padded.

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "hrdc/error.hpp"

namespace hrdc {

class BitWriter {
public:
    void bit(bool b) {
        if (fill_ == 0) out_.push_back(0);
        if (b) out_.back() |= static_cast<std::uint8_t>(0x80u >> fill_);
        fill_ = (fill_ + 1) & 7;
        ++bits_;
    }

    // Writes the low `width` bits of v, most significant first.
    void bits(std::uint64_t v, unsigned width) {
        for (unsigned i = width; i-- > 0;) bit((v >> i) & 1u);
    }

    // q ones followed by a terminating zero.
    void unary(std::uint64_t q) {
        for (std::uint64_t i = 0; i < q; ++i) bit(true);
        bit(false);
    }

    std::uint64_t bit_count() const noexcept { return bits_; }
    std::vector<std::uint8_t> take() noexcept { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
    unsigned fill_ = 0;
    std::uint64_t bits_ = 0;
};

class BitReader {
public:
    BitReader() = default;
    explicit BitReader(std::span<const std::uint8_t> data, std::uint64_t bit_pos = 0)
        : data_(data), pos_(bit_pos) {}

    bool bit() {
        if (pos_ >= data_.size() * 8) fail(ErrorCode::CorruptStream, "bit stream exhausted");
        bool b = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return b;
    }

    std::uint64_t bits(unsigned width) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(bit());
        return v;
    }

    // Counts ones up to and including the terminating zero.
    std::uint64_t unary() {
        std::uint64_t q = 0;
        const std::uint64_t limit = data_.size() * 8;
        while (true) {
            if (pos_ >= limit) fail(ErrorCode::CorruptStream, "unterminated unary code");
            if ((pos_ & 7) == 0) {
                std::uint8_t byte = data_[pos_ >> 3];
                if (byte == 0xFF) {
                    q += 8;
                    pos_ += 8;
                    continue;
                }
                unsigned ones = static_cast<unsigned>(std::countl_one(byte));
                q += ones;
                pos_ += ones + 1;
                return q;
            }
            if (!bit()) return q;
            ++q;
        }
    }

    std::uint64_t position() const noexcept { return pos_; }

private:
    std::span<const std::uint8_t> data_;
    std::uint64_t pos_ = 0;
};

}  // namespace hrdc
