#include "hrdc/text_store.hpp"

#include <algorithm>

#include "hrdc/error.hpp"
#include "hrdc/repair.hpp"

namespace hrdc {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

void DocMap::validate() const {
    if (char_starts.size() != word_starts.size()) fail(ErrorCode::CorruptStream, "doc map arrays differ in length");
    if (char_starts.empty()) return;
    if (char_starts[0] != 0 || word_starts[0] != 0) fail(ErrorCode::CorruptStream, "doc map must start at 0");
    for (std::size_t d = 1; d < size(); ++d)
        if (char_starts[d] <= char_starts[d - 1] || word_starts[d] < word_starts[d - 1])
            fail(ErrorCode::CorruptStream, "doc map not increasing");
    if (char_starts.back() >= total_chars || word_starts.back() > total_words)
        fail(ErrorCode::CorruptStream, "doc map beyond the text");
}

void serialize(const DocMap& map, ByteWriter& out) {
    out.uv(map.size());
    out.uv(map.total_chars);
    out.uv(map.total_words);
    out.packed(std::span<const u64>(map.char_starts), bit_width_of(map.total_chars));
    out.packed(std::span<const u64>(map.word_starts), bit_width_of(map.total_words));
}

DocMap deserialize_docmap(ByteReader& in) {
    DocMap m;
    const u64 n = in.uv();
    m.total_chars = in.uv();
    m.total_words = in.uv();
    if (n > in.remaining() * 8) fail(ErrorCode::CorruptStream, "doc map truncated");
    m.char_starts = in.packed<u64>(n);
    m.word_starts = in.packed<u64>(n);
    m.validate();
    return m;
}

std::vector<DocOffset> merge_occs_to_docs(std::span<const std::uint64_t> positions, const DocMap& map,
                                          PosUnit unit) {
    const auto& starts = unit == PosUnit::Char ? map.char_starts : map.word_starts;
    const u64 total = unit == PosUnit::Char ? map.total_chars : map.total_words;
    std::vector<DocOffset> out;
    out.reserve(positions.size());
    std::size_t d = 0;
    u64 prev = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const u64 p = positions[i];
        if (p >= total || starts.empty()) fail(ErrorCode::OutOfRange, "position beyond the text");
        if (i > 0 && p < prev) fail(ErrorCode::InvalidArgument, "positions must be ascending");
        prev = p;
        while (d + 1 < starts.size() && starts[d + 1] <= p) ++d;
        out.push_back({d, p - starts[d]});
    }
    return out;
}

TextStore TextStore::compress(std::span<const std::uint8_t> text, std::uint32_t sample_ct) {
    require(!text.empty(), ErrorCode::InvalidArgument, "text must be non-empty");
    require(sample_ct >= 1, ErrorCode::InvalidArgument, "sample_ct must be >= 1");
    RePairOptions opt;
    opt.first_rule = kFirstRule;
    auto g = repair_compress(std::vector<u32>(text.begin(), text.end()), opt);
    TextStore t;
    t.length_ = text.size();
    t.sample_ct_ = sample_ct;
    t.lefts_ = std::move(g.lefts);
    t.rights_ = std::move(g.rights);
    t.sequence_ = std::move(g.sequence);
    t.build_samples();
    return t;
}

TextStore TextStore::resampled(std::uint32_t sample_ct) const {
    require(sample_ct >= 1, ErrorCode::InvalidArgument, "sample_ct must be >= 1");
    TextStore t = *this;
    t.sample_ct_ = sample_ct;
    t.build_samples();
    return t;
}

void TextStore::build_samples() {
    std::vector<u64> rule_len(lefts_.size());
    auto len = [&](u32 s) { return s < kFirstRule ? u64{1} : rule_len[s - kFirstRule]; };
    for (std::size_t r = 0; r < lefts_.size(); ++r) rule_len[r] = len(lefts_[r]) + len(rights_[r]);
    samples_.clear();
    u64 pos = 0;
    for (std::size_t k = 0; k < sequence_.size(); ++k) {
        if (k % sample_ct_ == 0) samples_.push_back(pos);
        pos += len(sequence_[k]);
    }
    if (pos != length_) fail(ErrorCode::CorruptStream, "grammar does not cover the text");
}

std::vector<std::uint8_t> TextStore::extract(std::uint64_t a, std::uint64_t b, ExtractStats* stats) const {
    if (a > b || b > length_) fail(ErrorCode::OutOfRange, "extract range out of bounds");
    std::vector<std::uint8_t> out;
    if (a == b) return out;
    out.reserve(b - a);
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), a);
    const std::size_t k = static_cast<std::size_t>(it - samples_.begin()) - 1;
    u64 pos = samples_[k];
    u64 expanded = 0;
    std::vector<u32> stack;
    for (std::size_t i = k * sample_ct_; i < sequence_.size() && pos < b; ++i) {
        stack.push_back(sequence_[i]);
        while (!stack.empty() && pos < b) {
            const u32 s = stack.back();
            stack.pop_back();
            if (pos < a) ++expanded;
            if (s < kFirstRule) {
                if (pos >= a) out.push_back(static_cast<std::uint8_t>(s));
                ++pos;
            } else {
                stack.push_back(rights_[s - kFirstRule]);
                stack.push_back(lefts_[s - kFirstRule]);
            }
        }
        stack.clear();
    }
    if (stats) stats->expanded += expanded;
    return out;
}

void TextStore::serialize(ByteWriter& out) const {
    const u32 top = kFirstRule + static_cast<u32>(lefts_.size());
    out.uv(length_);
    out.uv(sample_ct_);
    out.uv(lefts_.size());
    out.uv(sequence_.size());
    out.packed(std::span<const u32>(lefts_), bit_width_of(top));
    out.packed(std::span<const u32>(rights_), bit_width_of(top));
    out.packed(std::span<const u32>(sequence_), bit_width_of(top));
    out.packed(std::span<const u64>(samples_), bit_width_of(length_));
    hrdc::serialize(docs, out);
}

TextStore TextStore::deserialize(ByteReader& in) {
    TextStore t;
    t.length_ = in.uv();
    const u64 ct = in.uv();
    if (ct == 0 || ct > 0xFFFFFFFFu) fail(ErrorCode::CorruptStream, "sample_ct out of range");
    t.sample_ct_ = static_cast<u32>(ct);
    const u64 rules = in.uv();
    const u64 m = in.uv();
    if (rules > in.remaining() * 8 || m > in.remaining() * 8 || rules > 0xFFFFFFFFu - kFirstRule)
        fail(ErrorCode::CorruptStream, "text store truncated");
    t.lefts_ = in.packed<u32>(rules);
    t.rights_ = in.packed<u32>(rules);
    for (u32 r = 0; r < rules; ++r)
        if (t.lefts_[r] >= kFirstRule + r || t.rights_[r] >= kFirstRule + r)
            fail(ErrorCode::CorruptStream, "rule refers forward");
    t.sequence_ = in.packed<u32>(m);
    for (u32 s : t.sequence_)
        if (s >= kFirstRule + rules) fail(ErrorCode::CorruptStream, "unknown symbol in sequence");
    t.samples_ = in.packed<u64>((m + t.sample_ct_ - 1) / t.sample_ct_);
    t.docs = deserialize_docmap(in);
    const auto stored = t.samples_;
    t.build_samples();
    if (stored != t.samples_) fail(ErrorCode::CorruptStream, "sample directory does not match the grammar");
    return t;
}

}  // namespace hrdc
