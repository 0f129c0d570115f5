#include "hrdc/lzend.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <map>

#include "hrdc/error.hpp"
#include "hrdc/gap_codecs.hpp"
#include "hrdc/suffix_array.hpp"

namespace hrdc {

namespace {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;

// FM-index over R = reverse(T) followed by a sentinel.
class ReverseFm {
public:
    explicit ReverseFm(std::span<const u8> t) : n_(t.size() + 1) {
        std::vector<std::int32_t> r(n_);
        for (std::size_t i = 0; i < t.size(); ++i) r[i] = t[t.size() - 1 - i] + 1;
        r[n_ - 1] = 0;
        const auto sa = suffix_array(r, 257);
        r = {};
        bwt_.resize(n_);
        isa_.resize(n_);
        ends_.assign(2 * n_, UINT32_MAX);
        for (std::size_t k = 0; k < n_; ++k) {
            const auto p = static_cast<std::size_t>(sa[k]);
            isa_[p] = static_cast<u32>(k);
            if (p + 1 < n_) ends_[n_ + k] = static_cast<u32>(t.size() - 1 - p);
            if (p == 0) {
                dollar_ = k;
                bwt_[k] = 0;
            } else {
                // R[p - 1] is T[n - p] (0-based over the text of length n_ - 1)
                bwt_[k] = t[t.size() - p];
            }
        }
        std::array<u64, 256> cnt{};
        for (u8 c : t) ++cnt[c];
        c_[0] = 1;
        for (int c = 0; c < 256; ++c) c_[c + 1] = c_[c] + cnt[c];
        const std::size_t blocks = n_ / kBlock + 2;
        occ_.assign(blocks * 256, 0);
        std::array<u32, 256> run{};
        for (std::size_t k = 0; k < n_; ++k) {
            if (k % kBlock == 0) std::copy(run.begin(), run.end(), occ_.begin() + (k / kBlock) * 256);
            ++run[bwt_[k]];
        }
        for (std::size_t k = n_ - 1; k > 0; --k) ends_[k] = std::min(ends_[2 * k], ends_[2 * k + 1]);
        const std::size_t last = (n_ + kBlock - 1) / kBlock;
        for (std::size_t b = last; b < blocks; ++b) std::copy(run.begin(), run.end(), occ_.begin() + b * 256);
    }

    std::size_t size() const noexcept { return n_; }
    // Row of the suffix of R starting at R position p.
    u32 rank_of(std::size_t p) const { return isa_[p]; }

    // Backward step: interval of c·Q from the interval [sp, ep) of Q.
    void step(u8 c, u64& sp, u64& ep) const {
        sp = c_[c] + occ(c, sp);
        ep = c_[c] + occ(c, ep);
    }

    // Smallest text position at which an occurrence in rows [sp, ep) ends.
    u64 min_end(u64 sp, u64 ep) const {
        u32 m = UINT32_MAX;
        for (u64 a = sp + n_, b = ep + n_; a < b; a >>= 1, b >>= 1) {
            if (a & 1) m = std::min(m, ends_[a++]);
            if (b & 1) m = std::min(m, ends_[--b]);
        }
        return m;
    }

private:
    static constexpr std::size_t kBlock = 128;

    u64 occ(u8 c, u64 k) const {
        const std::size_t b = k / kBlock;
        const std::size_t base = b * kBlock;
        u64 v;
        if (k - base <= kBlock / 2 || base + kBlock > n_) {
            v = occ_[b * 256 + c] + static_cast<u64>(std::count(bwt_.begin() + base, bwt_.begin() + k, c));
        } else {
            v = occ_[(b + 1) * 256 + c] -
                static_cast<u64>(std::count(bwt_.begin() + k, bwt_.begin() + base + kBlock, c));
        }
        if (c == 0 && dollar_ < k) --v;
        return v;
    }

    std::size_t n_;
    std::size_t dollar_ = 0;
    std::vector<u8> bwt_;
    std::vector<u32> isa_;
    std::vector<u32> ends_;  // min segment tree over each row's text end position
    std::vector<u32> occ_;
    std::array<u64, 257> c_{};
};

void push_phrase(LzEndParse& out, u32 source, u32 copy, std::span<const u8> t, u64 i) {
    const u64 n = t.size();
    out.sources.push_back(copy > 0 ? source : 0);
    out.copies.push_back(copy);
    if (i + copy < n) {
        out.trailing.push_back(t[i + copy]);
        out.ends.push_back(i + copy);
    } else {
        out.trailing.push_back(0);
        out.ends.push_back(n - 1);
        out.last_has_trailing = false;
    }
}

u64 zigzag(std::int64_t d) { return (static_cast<u64>(d) << 1) ^ static_cast<u64>(d >> 63); }
std::int64_t unzigzag(u64 z) { return static_cast<std::int64_t>(z >> 1) ^ -static_cast<std::int64_t>(z & 1); }

}  // namespace

LzEndParse lzend_parse(std::span<const std::uint8_t> t) {
    require(!t.empty(), ErrorCode::InvalidArgument, "LZ-End needs a non-empty input");
    require(t.size() < (u64{1} << 31) - 1, ErrorCode::InvalidArgument, "input too long");
    const u64 n = t.size();
    const ReverseFm fm(t);
    LzEndParse out;
    out.length = n;
    std::map<u32, u32> marked;  // FM row of a phrase end -> phrase id
    u64 i = 0;
    while (i < n) {
        u64 sp = 0, ep = fm.size();
        u32 best = 0, source = 0;
        for (u64 j = i; j < n; ++j) {
            fm.step(t[j], sp, ep);
            if (fm.min_end(sp, ep) >= i) break;
            const auto it = marked.lower_bound(static_cast<u32>(sp));
            if (it != marked.end() && it->first < ep) {
                best = static_cast<u32>(j - i + 1);
                source = it->second;
            }
        }
        push_phrase(out, source, best, t, i);
        const u64 end = out.ends.back();
        // T[end] sits at R position n - 1 - end.
        marked.emplace(fm.rank_of(n - 1 - end), static_cast<u32>(out.size() - 1));
        i = end + 1;
    }
    return out;
}

LzEndParse lzend_parse_reference(std::span<const std::uint8_t> t) {
    require(!t.empty(), ErrorCode::InvalidArgument, "LZ-End needs a non-empty input");
    const u64 n = t.size();
    LzEndParse out;
    out.length = n;
    u64 i = 0;
    while (i < n) {
        u32 best = 0, source = 0;
        for (std::size_t q = 0; q < out.size(); ++q) {
            const u64 e = out.ends[q];
            for (u64 len = std::min(e + 1, n - i); len > best; --len) {
                if (std::memcmp(t.data() + e + 1 - len, t.data() + i, len) == 0) {
                    best = static_cast<u32>(len);
                    source = static_cast<u32>(q);
                    break;
                }
            }
        }
        push_phrase(out, source, best, t, i);
        i = out.ends.back() + 1;
    }
    return out;
}

std::vector<std::uint8_t> lzend_expand(const LzEndParse& parse) {
    std::vector<u8> out;
    out.reserve(parse.length);
    for (std::size_t p = 0; p < parse.size(); ++p) {
        const u32 copy = parse.copies[p];
        if (copy > 0) {
            const u64 src_end = parse.ends[parse.sources[p]];
            if (parse.sources[p] >= p || src_end + 1 < copy) fail(ErrorCode::CorruptStream, "bad LZ-End source");
            const u64 from = src_end + 1 - copy;
            for (u32 k = 0; k < copy; ++k) out.push_back(out[from + k]);
        }
        if (p + 1 < parse.size() || parse.last_has_trailing) out.push_back(parse.trailing[p]);
    }
    return out;
}

// ---- random access form -------------------------------------------------

LzEndText LzEndText::encode(const LzEndParse& parse, unsigned ds) {
    require(ds >= 1, ErrorCode::InvalidArgument, "ds must be >= 1");
    LzEndText t;
    t.ds_ = ds;
    t.phrases_ = parse.size();
    t.length_ = parse.length;
    t.last_has_trailing_ = parse.last_has_trailing;
    t.trailing_ = parse.trailing;
    u32 prev = 0;
    for (std::size_t p = 0; p < parse.size(); ++p) {
        if (p % ds == 0) {
            t.len_samples_.push_back({parse.start_of(p), t.lens_.size()});
            t.src_samples_.push_back({prev, t.srcs_.size()});
        }
        vbyte::put(parse.ends[p] - parse.start_of(p) + 1, t.lens_);
        const u32 src = parse.copies[p] > 0 ? parse.sources[p] : prev;
        vbyte::put(zigzag(static_cast<std::int64_t>(src) - static_cast<std::int64_t>(prev)), t.srcs_);
        prev = src;
    }
    return t;
}

LzEndText::Phrase LzEndText::locate(std::uint64_t pos) const {
    const auto it = std::upper_bound(len_samples_.begin(), len_samples_.end(), pos,
                                     [](u64 x, const LenSample& s) { return x < s.start; });
    const std::size_t b = static_cast<std::size_t>(it - len_samples_.begin()) - 1;
    std::size_t p = b * ds_;
    u64 start = len_samples_[b].start;
    std::size_t off = len_samples_[b].offset;
    while (true) {
        if (p >= phrases_) fail(ErrorCode::CorruptStream, "position beyond the last phrase");
        const u64 len = vbyte::get(lens_, off);
        if (pos < start + len) return {p, start, len};
        start += len;
        ++p;
    }
}

LzEndText::Phrase LzEndText::phrase(std::size_t p) const {
    const std::size_t b = p / ds_;
    u64 start = len_samples_[b].start;
    std::size_t off = len_samples_[b].offset;
    for (std::size_t q = b * ds_;; ++q) {
        const u64 len = vbyte::get(lens_, off);
        if (q == p) return {p, start, len};
        start += len;
    }
}

std::uint32_t LzEndText::source(std::size_t p) const {
    const std::size_t b = p / ds_;
    std::int64_t v = src_samples_[b].prev;
    std::size_t off = src_samples_[b].offset;
    for (std::size_t q = b * ds_; q <= p; ++q) v += unzigzag(vbyte::get(srcs_, off));
    return static_cast<u32>(v);
}

std::uint64_t LzEndText::copy_len(std::size_t p, std::uint64_t len) const {
    return (p + 1 == phrases_ && !last_has_trailing_) ? len : len - 1;
}

std::vector<std::uint8_t> LzEndText::extract(std::uint64_t start, std::uint64_t len) const {
    if (start > length_ || len > length_ - start) fail(ErrorCode::OutOfRange, "extract range out of bounds");
    struct Task {
        u64 a;
        u64 b;
        int literal;  // >= 0: emit this byte
    };
    std::vector<u8> out;
    out.reserve(len);
    std::vector<Task> stack{{start, start + len, -1}};
    while (!stack.empty()) {
        const Task task = stack.back();
        stack.pop_back();
        if (task.literal >= 0) {
            out.push_back(static_cast<u8>(task.literal));
            continue;
        }
        if (task.a >= task.b) continue;
        const Phrase ph = locate(task.a);
        const u64 copy = copy_len(ph.index, ph.len);
        const u64 copy_end = ph.start + copy;
        const u64 piece_end = std::min(task.b, ph.start + ph.len);
        if (piece_end < task.b) stack.push_back({piece_end, task.b, -1});
        if (copy_end < piece_end) stack.push_back({0, 0, trailing_[ph.index]});
        if (task.a < copy_end) {
            const u32 q = source(ph.index);
            if (q >= ph.index) fail(ErrorCode::CorruptStream, "bad LZ-End source");
            const Phrase src = phrase(q);
            const u64 src_start = src.start + src.len - copy;
            stack.push_back({src_start + (task.a - ph.start), src_start + (std::min(piece_end, copy_end) - ph.start), -1});
        }
    }
    return out;
}

void LzEndText::serialize(ByteWriter& out) const {
    out.u32(ds_);
    out.uv(phrases_);
    out.uv(length_);
    out.u8(last_has_trailing_ ? 1 : 0);
    out.uv(lens_.size());
    out.bytes(lens_);
    out.uv(srcs_.size());
    out.bytes(srcs_);
    std::vector<std::uint64_t> starts, len_offs, prevs, src_offs;
    for (const auto& s : len_samples_) {
        starts.push_back(s.start);
        len_offs.push_back(s.offset);
    }
    for (const auto& s : src_samples_) {
        prevs.push_back(s.prev);
        src_offs.push_back(s.offset);
    }
    out.packed(std::span<const std::uint64_t>(starts), bit_width_of(length_));
    out.packed(std::span<const std::uint64_t>(len_offs), bit_width_of(lens_.size()));
    out.packed(std::span<const std::uint64_t>(prevs), bit_width_of(phrases_));
    out.packed(std::span<const std::uint64_t>(src_offs), bit_width_of(srcs_.size()));
    out.bytes(trailing_);
}

LzEndText LzEndText::deserialize(ByteReader& in) {
    LzEndText t;
    t.ds_ = in.u32();
    if (t.ds_ == 0) fail(ErrorCode::CorruptStream, "ds must be >= 1");
    t.phrases_ = in.uv();
    t.length_ = in.uv();
    if (t.phrases_ > in.remaining()) fail(ErrorCode::CorruptStream, "truncated segment");
    t.last_has_trailing_ = in.u8() != 0;
    const auto nlens = in.uv();
    if (nlens > in.remaining()) fail(ErrorCode::CorruptStream, "truncated segment");
    auto lens = in.bytes(nlens);
    t.lens_.assign(lens.begin(), lens.end());
    const auto nsrcs = in.uv();
    if (nsrcs > in.remaining()) fail(ErrorCode::CorruptStream, "truncated segment");
    auto srcs = in.bytes(nsrcs);
    t.srcs_.assign(srcs.begin(), srcs.end());
    const std::size_t blocks = (t.phrases_ + t.ds_ - 1) / t.ds_;
    const auto starts = in.packed<std::uint64_t>(blocks);
    const auto len_offs = in.packed<std::uint64_t>(blocks);
    const auto prevs = in.packed<std::uint64_t>(blocks);
    const auto src_offs = in.packed<std::uint64_t>(blocks);
    t.len_samples_.resize(blocks);
    t.src_samples_.resize(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        if (len_offs[b] > t.lens_.size()) fail(ErrorCode::CorruptStream, "sample beyond the length stream");
        if (src_offs[b] > t.srcs_.size()) fail(ErrorCode::CorruptStream, "sample beyond the source stream");
        t.len_samples_[b].start = starts[b];
        t.len_samples_[b].offset = len_offs[b];
        t.src_samples_[b].prev = static_cast<decltype(t.src_samples_[b].prev)>(prevs[b]);
        t.src_samples_[b].offset = src_offs[b];
    }
    auto trailing = in.bytes(t.phrases_);
    t.trailing_.assign(trailing.begin(), trailing.end());
    return t;
}

}  // namespace hrdc
