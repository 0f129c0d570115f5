#pragma once

// Gap codecs for strictly increasing integer lists.
//
// A list v[0] < v[1] < ... (all >= 1) is stored as gaps g[0] = v[0],
// g[i] = v[i] - v[i-1]. Every codec here maps a gap sequence to a payload
// that is only decodable together with (codec, n, params); encode_stream()
// prepends those in an 8-byte header so a stream is self-contained.
// Bit-exact layouts are documented in FORMATS.md.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hrdc/bit_io.hpp"

namespace hrdc {

using Value = std::uint64_t;

enum class CodecId : std::uint8_t {
    Vbyte = 0,
    Rice = 1,
    Simple9 = 2,
    PforDelta = 3,
    RiceRuns = 4,
};

std::string_view to_string(CodecId codec) noexcept;
CodecId codec_from_string(std::string_view name);

struct RiceParams {
    unsigned b = 0;  // remainder width, 0..62
};

struct PforConfig {
    unsigned pfdThreshold = 100;  // block length in values, 1..4096
};

struct CodecParams {
    RiceParams rice;
    PforConfig pfor;
};

inline constexpr unsigned kMaxRiceWidth = 62;
inline constexpr unsigned kMaxPforBlock = 4096;
inline constexpr Value kSimple9Limit = Value{1} << 28;  // stored slot value (gap - 1) must be below this

// Verifies 1 <= v[0] < v[1] < ... <= universe.
void validate_list(std::span<const Value> values, Value universe);

std::vector<Value> to_gaps(std::span<const Value> values);
std::vector<Value> from_gaps(std::span<const Value> gaps);

// Payload only, no header.
std::vector<std::uint8_t> encode(std::span<const Value> gaps, CodecId codec, const CodecParams& params = {});
std::vector<Value> decode(std::span<const std::uint8_t> payload, CodecId codec, std::size_t n,
                          const CodecParams& params = {});

// Cost in bits of Rice-coding `gaps` with remainder width b.
std::uint64_t rice_cost_bits(std::span<const Value> gaps, unsigned b);
RiceParams rice_param_select(std::span<const Value> gaps);

// Token stream of the run-length Rice variant: each maximal run of k unit
// gaps becomes the pair (1, k); other gaps are copied.
std::vector<Value> riceruns_tokens(std::span<const Value> gaps);

// Picks the data-dependent parameter of `codec` for `gaps` (Rice width; the
// PforDelta block length is taken from `base`).
CodecParams select_params(CodecId codec, std::span<const Value> gaps, const CodecParams& base = {});

// Self-contained stream: codec(1) reserved(1) n(4) param(2) payload.
struct StreamHeader {
    CodecId codec = CodecId::Vbyte;
    std::uint32_t n = 0;
    std::uint16_t param = 0;
};
inline constexpr std::size_t kStreamHeaderBytes = 8;

std::vector<std::uint8_t> encode_stream(std::span<const Value> gaps, CodecId codec, const CodecParams& params = {});
StreamHeader read_stream_header(std::span<const std::uint8_t> stream);
CodecParams params_from_header(const StreamHeader& h);
std::vector<Value> decode_stream(std::span<const std::uint8_t> stream);

namespace vbyte {
void put(Value v, std::vector<std::uint8_t>& out);
// Reads one value at `pos` and advances it.
Value get(std::span<const std::uint8_t> in, std::size_t& pos);
std::size_t encoded_size(Value v) noexcept;
}  // namespace vbyte

namespace simple9 {
struct Case {
    unsigned count;
    unsigned width;
};
inline constexpr std::array<Case, 9> kCases{{
    {28, 1}, {14, 2}, {9, 3}, {7, 4}, {5, 5}, {4, 7}, {3, 9}, {2, 14}, {1, 28},
}};
// Stores values (each >= 1) as value - 1, one 32-bit little-endian word per group.
void encode_words(std::span<const Value> values, std::vector<std::uint8_t>& out);
// Decodes `n` values starting at byte offset `pos`, advancing it past the consumed words.
void decode_words(std::span<const std::uint8_t> in, std::size_t& pos, std::size_t n, std::vector<Value>& out);
}  // namespace simple9

// Sequential decoder over a payload. Block codecs decode one word/block at a
// time; the run-length Rice variant exposes pending unit runs so callers can
// jump over them arithmetically.
class GapReader {
public:
    GapReader() = default;
    GapReader(std::span<const std::uint8_t> payload, CodecId codec, std::size_t n, const CodecParams& params);

    bool done() const noexcept { return consumed_ >= n_; }
    std::size_t consumed() const noexcept { return consumed_; }
    std::size_t size() const noexcept { return n_; }

    Value next();

    // Vbyte only: continue decoding from `byte_offset` as if `consumed` gaps were read.
    void seek_vbyte(std::size_t byte_offset, std::size_t consumed);
    std::size_t vbyte_offset() const noexcept { return byte_pos_; }

    // Unit gaps of the current run that have not been returned yet.
    Value pending_units() const noexcept { return pending_units_; }
    void skip_units(Value k);

    // Number of codewords (or packed slots) decoded so far.
    std::uint64_t decoded() const noexcept { return decoded_; }

private:
    void refill();

    std::span<const std::uint8_t> payload_;
    CodecId codec_ = CodecId::Vbyte;
    CodecParams params_;
    std::size_t n_ = 0;
    std::size_t consumed_ = 0;
    std::size_t byte_pos_ = 0;
    BitReader bits_;
    Value pending_units_ = 0;
    std::vector<Value> buf_;
    std::size_t buf_pos_ = 0;
    std::uint64_t decoded_ = 0;
};

}  // namespace hrdc
