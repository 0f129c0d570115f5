#pragma once

// Lempel-Ziv backed posting stores over Vbyte-coded gaps:
//   VLzIndex     - each list's Vbyte stream compressed on its own (raw LZMA2)
//                  once it reaches minbcssize bytes;
//   LzEndPostings - all Vbyte streams concatenated and LZ-End parsed as a whole.

#include <cstdint>
#include <span>
#include <vector>

#include "hrdc/byte_io.hpp"
#include "hrdc/gap_codecs.hpp"
#include "hrdc/intersect.hpp"
#include "hrdc/lzend.hpp"
#include "hrdc/postings.hpp"

namespace hrdc {

namespace lzma {
std::vector<std::uint8_t> compress(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> data, std::size_t original_length);
}  // namespace lzma

inline constexpr std::size_t kDefaultMinBcsSize = 10;

struct VLzIndex {
    std::size_t minbcssize = kDefaultMinBcsSize;
    Value universe = 0;
    std::vector<std::uint64_t> flags;         // bit i: list i is compressed
    std::vector<std::uint32_t> lengths;       // values per list
    std::vector<std::uint32_t> vbyte_sizes;   // Vbyte stream bytes per list
    std::vector<std::uint64_t> offsets;       // payload start per list, plus end
    std::vector<std::uint8_t> payload;

    std::size_t list_count() const noexcept { return lengths.size(); }
    bool compressed(std::size_t i) const noexcept { return (flags[i >> 6] >> (i & 63)) & 1u; }
};

VLzIndex vlz_build(std::span<const std::vector<Value>> lists, Value universe,
                   std::size_t minbcssize = kDefaultMinBcsSize);
std::vector<Value> vlz_fetch(const VLzIndex& index, std::size_t i);
// Vbyte-coded list i as a postings representation (decompressed on the way).
ListRepr vlz_list(const VLzIndex& index, std::size_t i);

void serialize(const VLzIndex& index, ByteWriter& out);
VLzIndex deserialize_vlz(ByteReader& in);

struct LzEndPostings {
    Value universe = 0;
    std::vector<std::uint32_t> lengths;
    std::vector<std::uint64_t> list_offsets;  // byte offset of each Vbyte stream, plus end
    LzEndText text;

    std::size_t list_count() const noexcept { return lengths.size(); }
};

// Concatenated Vbyte streams; parse it once and encode per ds with lzend_store.
std::vector<std::uint8_t> lzend_concat(std::span<const std::vector<Value>> lists, Value universe,
                                       std::vector<std::uint64_t>& offsets);
LzEndPostings lzend_build(std::span<const std::vector<Value>> lists, Value universe, unsigned ds);
LzEndPostings lzend_store(const LzEndParse& parse, std::vector<std::uint32_t> lengths,
                          std::vector<std::uint64_t> offsets, Value universe, unsigned ds);
std::vector<Value> lzend_fetch(const LzEndPostings& index, std::size_t i);
ListRepr lzend_list(const LzEndPostings& index, std::size_t i);

void serialize(const LzEndPostings& index, ByteWriter& out);
LzEndPostings deserialize_lzend(ByteReader& in);

}  // namespace hrdc
