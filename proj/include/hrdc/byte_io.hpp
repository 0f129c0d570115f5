#pragma once

// Little-endian, varint and bit-packed serialization helpers shared by every
// segment format.

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "hrdc/error.hpp"

namespace hrdc {

// Bits needed to store every value up to `max` (at least 1).
inline unsigned bit_width_of(std::uint64_t max) noexcept {
    unsigned w = 1;
    while (w < 64 && (max >> w)) ++w;
    return w;
}

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    template <class T>
    void u32_array(std::span<const T> xs) {
        for (auto x : xs) u32(static_cast<std::uint32_t>(x));
    }
    template <class T>
    void u64_array(std::span<const T> xs) {
        for (auto x : xs) u64(static_cast<std::uint64_t>(x));
    }

    // LEB128
    void uv(std::uint64_t v) {
        while (v >= 0x80) {
            buf_.push_back(static_cast<std::uint8_t>(v | 0x80));
            v >>= 7;
        }
        buf_.push_back(static_cast<std::uint8_t>(v));
    }

    // u8 width, then each value in `width` bits, LSB first, zero-padded to a byte.
    template <class T>
    void packed(std::span<const T> xs, unsigned width) {
        if (width == 0 || width > 64) fail(ErrorCode::InvalidArgument, "packed width must be in [1, 64]");
        u8(static_cast<std::uint8_t>(width));
        std::uint64_t acc = 0;
        unsigned fill = 0;
        for (auto x : xs) {
            auto v = static_cast<std::uint64_t>(x);
            for (unsigned left = width; left > 0;) {
                const unsigned take = left < 32 ? left : 32;
                acc |= (v & ((std::uint64_t{1} << take) - 1)) << fill;
                fill += take;
                v >>= take;
                left -= take;
                for (; fill >= 8; fill -= 8, acc >>= 8) buf_.push_back(static_cast<std::uint8_t>(acc));
            }
        }
        if (fill) buf_.push_back(static_cast<std::uint8_t>(acc));
    }

    std::size_t size() const noexcept { return buf_.size(); }
    const std::vector<std::uint8_t>& data() const noexcept { return buf_; }
    std::vector<std::uint8_t> take() noexcept { return std::move(buf_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    template <class T>
    std::vector<T> u32_array(std::size_t n) {
        need(n * 4);
        std::vector<T> out(n);
        for (auto& x : out) x = static_cast<T>(u32());
        return out;
    }
    template <class T>
    std::vector<T> u64_array(std::size_t n) {
        need(n * 8);
        std::vector<T> out(n);
        for (auto& x : out) x = static_cast<T>(u64());
        return out;
    }

    std::uint64_t uv() {
        std::uint64_t v = 0;
        for (unsigned shift = 0;; shift += 7) {
            const std::uint8_t b = u8();
            if (shift == 63 && b > 1) fail(ErrorCode::CorruptStream, "varint overflow");
            v |= std::uint64_t{b & 0x7Fu} << shift;
            if (!(b & 0x80)) return v;
            if (shift == 63) fail(ErrorCode::CorruptStream, "varint overflow");
        }
    }

    template <class T>
    std::vector<T> packed(std::size_t n) {
        const unsigned width = u8();
        if (width == 0 || width > 64) fail(ErrorCode::CorruptStream, "bad packed width");
        if (n > remaining() * 8 / width) fail(ErrorCode::CorruptStream, "truncated segment");
        need((n * width + 7) / 8);
        std::vector<T> out(n);
        std::uint64_t acc = 0;
        unsigned fill = 0;
        for (auto& x : out) {
            std::uint64_t v = 0;
            for (unsigned got = 0; got < width;) {
                const unsigned take = width - got < 32 ? width - got : 32;
                for (; fill < take; fill += 8) acc |= std::uint64_t{data_[pos_++]} << fill;
                v |= (acc & ((std::uint64_t{1} << take) - 1)) << got;
                acc >>= take;
                fill -= take;
                got += take;
            }
            x = static_cast<T>(v);
        }
        return out;
    }

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    bool done() const noexcept { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (n > data_.size() - pos_) fail(ErrorCode::CorruptStream, "truncated segment");
    }
    std::uint64_t get(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace hrdc
