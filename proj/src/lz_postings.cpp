#include "hrdc/lz_postings.hpp"

#include <lzma.h>

#include <algorithm>
#include <bit>

#include "hrdc/error.hpp"

namespace hrdc {

namespace lzma {

namespace {

// The dictionary never needs to exceed the input; both sides derive it from
// the original length so raw streams carry no header.
lzma_options_lzma options_for(std::size_t original_length) {
    lzma_options_lzma opt;
    if (lzma_lzma_preset(&opt, LZMA_PRESET_DEFAULT)) fail(ErrorCode::BackendError, "lzma preset unavailable");
    const std::size_t want = std::bit_ceil(std::max<std::size_t>(original_length, 1));
    opt.dict_size = static_cast<std::uint32_t>(std::clamp<std::size_t>(want, LZMA_DICT_SIZE_MIN, 1u << 24));
    return opt;
}

}  // namespace

std::vector<std::uint8_t> compress(std::span<const std::uint8_t> data) {
    lzma_options_lzma opt = options_for(data.size());
    lzma_filter filters[2] = {{LZMA_FILTER_LZMA2, &opt}, {LZMA_VLI_UNKNOWN, nullptr}};
    std::vector<std::uint8_t> out(data.size() + data.size() / 2 + 256);
    std::size_t out_pos = 0;
    const lzma_ret r =
        lzma_raw_buffer_encode(filters, nullptr, data.data(), data.size(), out.data(), &out_pos, out.size());
    if (r != LZMA_OK) fail(ErrorCode::BackendError, "lzma encode failed");
    out.resize(out_pos);
    return out;
}

std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> data, std::size_t original_length) {
    lzma_options_lzma opt = options_for(original_length);
    lzma_filter filters[2] = {{LZMA_FILTER_LZMA2, &opt}, {LZMA_VLI_UNKNOWN, nullptr}};
    std::vector<std::uint8_t> out(original_length);
    std::size_t in_pos = 0, out_pos = 0;
    const lzma_ret r = lzma_raw_buffer_decode(filters, nullptr, data.data(), &in_pos, data.size(), out.data(),
                                              &out_pos, out.size());
    if ((r != LZMA_OK && r != LZMA_STREAM_END) || out_pos != original_length)
        fail(ErrorCode::CorruptStream, "lzma payload does not decode");
    return out;
}

}  // namespace lzma

namespace {

std::vector<Value> decode_vbyte_list(std::span<const std::uint8_t> bytes, std::size_t n) {
    auto gaps = decode(bytes, CodecId::Vbyte, n);
    return from_gaps(gaps);
}

ListRepr vbyte_repr(std::vector<std::uint8_t> bytes, std::size_t n, Value universe) {
    ListRepr r;
    r.kind = ReprKind::Encoded;
    r.codec = CodecId::Vbyte;
    r.length = n;
    r.universe = universe;
    r.payload = std::move(bytes);
    return r;
}

}  // namespace

// ---- VLz ------------------------------------------------------------------

VLzIndex vlz_build(std::span<const std::vector<Value>> lists, Value universe, std::size_t minbcssize) {
    VLzIndex idx;
    idx.minbcssize = minbcssize;
    idx.universe = universe;
    idx.flags.assign((lists.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < lists.size(); ++i) {
        validate_list(lists[i], universe);
        const auto bytes = encode(to_gaps(lists[i]), CodecId::Vbyte);
        idx.lengths.push_back(static_cast<std::uint32_t>(lists[i].size()));
        idx.vbyte_sizes.push_back(static_cast<std::uint32_t>(bytes.size()));
        idx.offsets.push_back(idx.payload.size());
        if (bytes.size() >= minbcssize) {
            idx.flags[i >> 6] |= std::uint64_t{1} << (i & 63);
            const auto packed = lzma::compress(bytes);
            idx.payload.insert(idx.payload.end(), packed.begin(), packed.end());
        } else {
            idx.payload.insert(idx.payload.end(), bytes.begin(), bytes.end());
        }
    }
    idx.offsets.push_back(idx.payload.size());
    return idx;
}

ListRepr vlz_list(const VLzIndex& idx, std::size_t i) {
    if (i >= idx.list_count()) fail(ErrorCode::OutOfRange, "list index out of range");
    const std::span<const std::uint8_t> stored(idx.payload.data() + idx.offsets[i], idx.offsets[i + 1] - idx.offsets[i]);
    std::vector<std::uint8_t> bytes;
    if (idx.compressed(i)) {
        bytes = lzma::decompress(stored, idx.vbyte_sizes[i]);
    } else {
        if (stored.size() != idx.vbyte_sizes[i]) fail(ErrorCode::CorruptStream, "raw list size mismatch");
        bytes.assign(stored.begin(), stored.end());
    }
    return vbyte_repr(std::move(bytes), idx.lengths[i], idx.universe);
}

std::vector<Value> vlz_fetch(const VLzIndex& idx, std::size_t i) {
    const ListRepr r = vlz_list(idx, i);
    return decode_vbyte_list(r.payload, r.length);
}

namespace {

template <class T>
void put_packed(ByteWriter& out, const std::vector<T>& xs) {
    std::uint64_t max = 0;
    for (auto x : xs) max = std::max<std::uint64_t>(max, x);
    out.packed(std::span<const T>(xs), bit_width_of(max));
}

std::size_t get_count(ByteReader& in) {
    const auto c = in.uv();
    if (c > in.remaining() * 8) fail(ErrorCode::CorruptStream, "truncated segment");
    return static_cast<std::size_t>(c);
}

}  // namespace

void serialize(const VLzIndex& idx, ByteWriter& out) {
    out.uv(idx.list_count());
    out.uv(idx.minbcssize);
    out.uv(idx.universe);
    out.u64_array(std::span<const std::uint64_t>(idx.flags));
    put_packed(out, idx.lengths);
    put_packed(out, idx.vbyte_sizes);
    put_packed(out, idx.offsets);
    out.bytes(idx.payload);
}

VLzIndex deserialize_vlz(ByteReader& in) {
    VLzIndex idx;
    const std::size_t n = get_count(in);
    idx.minbcssize = static_cast<std::size_t>(in.uv());
    idx.universe = in.uv();
    if ((n + 63) / 64 > in.remaining() / 8) fail(ErrorCode::CorruptStream, "truncated segment");
    idx.flags = in.u64_array<std::uint64_t>((n + 63) / 64);
    idx.lengths = in.packed<std::uint32_t>(n);
    idx.vbyte_sizes = in.packed<std::uint32_t>(n);
    idx.offsets = in.packed<std::uint64_t>(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        if (idx.offsets[i] > idx.offsets[i + 1]) fail(ErrorCode::CorruptStream, "offsets not monotone");
    if (idx.offsets[0] != 0) fail(ErrorCode::CorruptStream, "offsets must start at 0");
    const auto payload = in.bytes(idx.offsets[n]);
    idx.payload.assign(payload.begin(), payload.end());
    return idx;
}

// ---- LZ-End -------------------------------------------------------------

std::vector<std::uint8_t> lzend_concat(std::span<const std::vector<Value>> lists, Value universe,
                                       std::vector<std::uint64_t>& offsets) {
    std::vector<std::uint8_t> all;
    offsets.clear();
    for (const auto& l : lists) {
        validate_list(l, universe);
        offsets.push_back(all.size());
        const auto bytes = encode(to_gaps(l), CodecId::Vbyte);
        all.insert(all.end(), bytes.begin(), bytes.end());
    }
    offsets.push_back(all.size());
    return all;
}

LzEndPostings lzend_store(const LzEndParse& parse, std::vector<std::uint32_t> lengths,
                          std::vector<std::uint64_t> offsets, Value universe, unsigned ds) {
    LzEndPostings idx;
    idx.universe = universe;
    idx.lengths = std::move(lengths);
    idx.list_offsets = std::move(offsets);
    require(idx.list_offsets.size() == idx.lengths.size() + 1, ErrorCode::InvalidArgument, "one offset per list");
    idx.text = LzEndText::encode(parse, ds);
    return idx;
}

LzEndPostings lzend_build(std::span<const std::vector<Value>> lists, Value universe, unsigned ds) {
    std::vector<std::uint64_t> offsets;
    const auto all = lzend_concat(lists, universe, offsets);
    std::vector<std::uint32_t> lengths;
    for (const auto& l : lists) lengths.push_back(static_cast<std::uint32_t>(l.size()));
    if (all.empty()) return lzend_store(LzEndParse{}, std::move(lengths), std::move(offsets), universe, ds);
    return lzend_store(lzend_parse(all), std::move(lengths), std::move(offsets), universe, ds);
}

ListRepr lzend_list(const LzEndPostings& idx, std::size_t i) {
    if (i >= idx.list_count()) fail(ErrorCode::OutOfRange, "list index out of range");
    auto bytes = idx.text.extract(idx.list_offsets[i], idx.list_offsets[i + 1] - idx.list_offsets[i]);
    return vbyte_repr(std::move(bytes), idx.lengths[i], idx.universe);
}

std::vector<Value> lzend_fetch(const LzEndPostings& idx, std::size_t i) {
    const ListRepr r = lzend_list(idx, i);
    return decode_vbyte_list(r.payload, r.length);
}

void serialize(const LzEndPostings& idx, ByteWriter& out) {
    out.uv(idx.list_count());
    out.uv(idx.universe);
    put_packed(out, idx.lengths);
    put_packed(out, idx.list_offsets);
    idx.text.serialize(out);
}

LzEndPostings deserialize_lzend(ByteReader& in) {
    LzEndPostings idx;
    const std::size_t n = get_count(in);
    idx.universe = in.uv();
    idx.lengths = in.packed<std::uint32_t>(n);
    idx.list_offsets = in.packed<std::uint64_t>(n + 1);
    idx.text = LzEndText::deserialize(in);
    for (std::size_t i = 0; i < n; ++i)
        if (idx.list_offsets[i] > idx.list_offsets[i + 1]) fail(ErrorCode::CorruptStream, "offsets not monotone");
    if (idx.list_offsets[n] != idx.text.length()) fail(ErrorCode::CorruptStream, "offsets exceed the text");
    return idx;
}

}  // namespace hrdc
