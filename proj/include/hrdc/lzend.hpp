#pragma once

// LZ-End parsing: every phrase copies a string that ends exactly where an
// earlier phrase ends, then appends one literal byte. The last phrase may
// have no literal when the input ends inside a copy.

#include <cstdint>
#include <span>
#include <vector>

#include "hrdc/byte_io.hpp"

namespace hrdc {

struct LzEndParse {
    std::vector<std::uint32_t> sources;  // phrase whose end the copy ends at (0 when copy == 0)
    std::vector<std::uint32_t> copies;   // copy lengths
    std::vector<std::uint8_t> trailing;  // literal bytes
    std::vector<std::uint64_t> ends;     // inclusive end position of each phrase
    bool last_has_trailing = true;
    std::uint64_t length = 0;

    std::size_t size() const noexcept { return copies.size(); }
    std::uint64_t start_of(std::size_t p) const noexcept { return p == 0 ? 0 : ends[p - 1] + 1; }
};

// Greedy longest-copy parse over an FM-index of the reversed input.
LzEndParse lzend_parse(std::span<const std::uint8_t> bytes);
// Quadratic reference parser.
LzEndParse lzend_parse_reference(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> lzend_expand(const LzEndParse& parse);

// Compact form supporting random access. Phrase lengths are Vbyte coded and
// sources as zigzag deltas; both carry absolute samples every `ds` phrases.
class LzEndText {
public:
    LzEndText() = default;
    static LzEndText encode(const LzEndParse& parse, unsigned ds);

    std::vector<std::uint8_t> extract(std::uint64_t start, std::uint64_t len) const;

    std::uint64_t length() const noexcept { return length_; }
    std::size_t phrase_count() const noexcept { return phrases_; }
    unsigned ds() const noexcept { return ds_; }

    void serialize(ByteWriter& out) const;
    static LzEndText deserialize(ByteReader& in);

private:
    struct LenSample {
        std::uint64_t start;   // text position where the block's first phrase starts
        std::uint64_t offset;  // byte offset in lens_
    };
    struct SrcSample {
        std::uint32_t prev;    // source of the phrase before the block
        std::uint64_t offset;  // byte offset in srcs_
    };
    struct Phrase {
        std::size_t index;
        std::uint64_t start;
        std::uint64_t len;
    };

    Phrase locate(std::uint64_t pos) const;
    Phrase phrase(std::size_t p) const;
    std::uint32_t source(std::size_t p) const;
    std::uint64_t copy_len(std::size_t p, std::uint64_t len) const;

    unsigned ds_ = 1;
    std::size_t phrases_ = 0;
    std::uint64_t length_ = 0;
    bool last_has_trailing_ = true;
    std::vector<std::uint8_t> lens_;
    std::vector<std::uint8_t> srcs_;
    std::vector<LenSample> len_samples_;
    std::vector<SrcSample> src_samples_;
    std::vector<std::uint8_t> trailing_;
};

}  // namespace hrdc
