#include "hrdc/postings.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "hrdc/error.hpp"

namespace hrdc {

namespace {

using u128 = unsigned __int128;

unsigned ceil_log2(std::size_t x) {
    if (x <= 1) return 0;
    return static_cast<unsigned>(64 - std::countl_zero(static_cast<std::uint64_t>(x - 1)));
}

bool bit_set(const std::vector<std::uint64_t>& words, Value v) {
    const std::size_t w = static_cast<std::size_t>(v >> 6);
    return w < words.size() && ((words[w] >> (v & 63)) & 1u);
}

void check_same_universe(std::span<const ListRepr* const> lists) {
    if (lists.size() < 2) fail(ErrorCode::InvalidArgument, "intersection needs at least two lists");
    for (const auto* l : lists)
        if (l->universe != lists.front()->universe) fail(ErrorCode::UniverseMismatch, "lists have different universes");
}

std::vector<std::size_t> order_by_length(std::span<const ListRepr* const> lists) {
    std::vector<std::size_t> order(lists.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lists[a]->length < lists[b]->length; });
    return order;
}

std::vector<Value> probe_intersect(std::span<const ListRepr* const> lists, std::span<const Value> shifts,
                                   IntersectStats* stats) {
    const auto order = order_by_length(lists);
    ListCursor first(*lists[order[0]], false);
    auto candidates = drain_shifted(first, shifts[order[0]]);
    std::uint64_t decoded = first.decoded();
    for (std::size_t i = 1; i < order.size() && !candidates.empty(); ++i) {
        ListCursor c(*lists[order[i]], true);
        candidates = filter_candidates(std::span<const Value>(candidates), c, shifts[order[i]]);
        decoded += c.decoded();
    }
    if (stats) stats->decoded += decoded;
    return candidates;
}

}  // namespace

std::size_t cm_period(unsigned k, std::size_t length) {
    return std::max<std::size_t>(1, std::size_t{k} * ceil_log2(length));
}

unsigned st_shift(Value universe, unsigned B, std::size_t length) {
    if (length == 0) return 0;
    const u128 target = u128{universe} * B;
    unsigned e = 0;
    while ((u128{1} << e) * length < target) ++e;
    return e;
}

bool uses_bitmap(std::size_t length, Value universe, const HybridConfig& hybrid) {
    return u128{length} * hybrid.lenBitmapDiv > u128{universe};
}

ListRepr build_list(std::span<const Value> values, Value universe, CodecId codec, Sampling sampling,
                    std::optional<HybridConfig> hybrid, const CodecParams& base) {
    validate_list(values, universe);
    if (hybrid && hybrid->lenBitmapDiv < 1) fail(ErrorCode::InvalidArgument, "lenBitmapDiv must be >= 1");
    ListRepr r;
    r.length = values.size();
    r.universe = universe;
    r.codec = codec;
    if (hybrid && uses_bitmap(values.size(), universe, *hybrid)) {
        r.kind = ReprKind::Bitmap;
        r.bitmap.assign(static_cast<std::size_t>(universe / 64 + 1), 0);
        for (Value v : values) r.bitmap[v >> 6] |= std::uint64_t{1} << (v & 63);
        return r;
    }
    const auto gaps = to_gaps(values);
    r.params = select_params(codec, gaps, base);
    r.payload = encode(gaps, codec, r.params);
    if (sampling.kind == SamplingKind::None || values.empty()) return r;
    if (codec != CodecId::Vbyte) fail(ErrorCode::InvalidArgument, "list sampling requires Vbyte streams");
    if (sampling.param < 1) fail(ErrorCode::InvalidArgument, "sampling parameter must be >= 1");

    if (sampling.kind == SamplingKind::CM) {
        CMSamples cm;
        cm.k = sampling.param;
        cm.period = cm_period(sampling.param, values.size());
        std::size_t offset = 0;
        for (std::size_t i = 0; i < gaps.size(); ++i) {
            offset += vbyte::encoded_size(gaps[i]);
            if (i % cm.period == 0)
                cm.entries.push_back({static_cast<std::uint32_t>(i), values[i], static_cast<std::uint32_t>(offset)});
        }
        r.cm = std::move(cm);
    } else {
        STSamples st;
        st.B = sampling.param;
        st.shift = st_shift(universe, sampling.param, values.size());
        const Value s = st.width();
        const std::size_t nb = static_cast<std::size_t>((universe + s - 1) / s) + 1;
        st.buckets.resize(nb);
        std::size_t i = 0;
        std::size_t offset = 0;
        Value prev = 0;
        for (std::size_t j = 0; j < nb; ++j) {
            const u128 lo = u128{j} * s;
            while (i < values.size() && values[i] < lo) {
                offset += vbyte::encoded_size(gaps[i]);
                prev = values[i];
                ++i;
            }
            st.buckets[j] = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(offset), prev};
        }
        r.st = std::move(st);
    }
    return r;
}

// ---- ListCursor ---------------------------------------------------------

ListCursor::ListCursor(const ListRepr& repr, bool use_samples) : repr_(&repr), use_samples_(use_samples) {
    if (repr.kind == ReprKind::Encoded) reader_ = GapReader(repr.payload, repr.codec, repr.length, repr.params);
}

std::uint64_t ListCursor::decoded() const noexcept { return reader_.decoded() + extra_decoded_; }

void ListCursor::resume(std::size_t consumed, Value current, std::size_t offset) {
    reader_.seek_vbyte(offset, consumed);
    current_ = current;
    started_ = consumed > 0;
}

std::optional<Value> ListCursor::bitmap_from(Value x) {
    const auto& words = repr_->bitmap;
    if (x > repr_->universe) return std::nullopt;
    std::size_t w = static_cast<std::size_t>(x >> 6);
    std::uint64_t word = words[w] & (~std::uint64_t{0} << (x & 63));
    while (true) {
        ++extra_decoded_;
        if (word != 0) {
            current_ = (Value{w} << 6) + static_cast<Value>(std::countr_zero(word));
            started_ = true;
            return current_;
        }
        if (++w >= words.size()) return std::nullopt;
        word = words[w];
    }
}

std::optional<Value> ListCursor::next() {
    if (repr_->kind == ReprKind::Bitmap) return bitmap_from(started_ ? current_ + 1 : 1);
    if (reader_.done()) return std::nullopt;
    current_ += reader_.next();
    started_ = true;
    return current_;
}

std::optional<Value> ListCursor::seek_linear(Value x) {
    if (started_ && current_ >= x) return current_;
    while (!reader_.done()) {
        if (const Value pending = reader_.pending_units(); pending > 0) {
            if (current_ + pending < x) {
                reader_.skip_units(pending);
                current_ += pending;
                ++extra_decoded_;
                continue;
            }
            const Value k = x - current_ - 1;
            reader_.skip_units(k);
            current_ += k;
        }
        current_ += reader_.next();
        started_ = true;
        if (current_ >= x) return current_;
    }
    return std::nullopt;
}

std::optional<Value> ListCursor::seek_cm(Value x) {
    if (started_ && current_ >= x) return current_;
    const auto& e = repr_->cm->entries;
    const std::size_t consumed = reader_.consumed();
    const auto it = std::lower_bound(e.begin(), e.end(), consumed,
                                     [](const CMSample& s, std::size_t c) { return s.index < c; });
    std::size_t lo = static_cast<std::size_t>(it - e.begin());
    if (lo < e.size() && e[lo].value <= x) {
        // Exponential search for the last sample with value <= x.
        std::size_t good = lo;
        std::size_t step = 1;
        std::size_t bad = e.size();
        while (true) {
            const std::size_t probe = good + step;
            if (probe >= e.size()) break;
            if (e[probe].value <= x) {
                good = probe;
                step *= 2;
            } else {
                bad = probe;
                break;
            }
        }
        const auto last = std::upper_bound(e.begin() + static_cast<std::ptrdiff_t>(good),
                                           e.begin() + static_cast<std::ptrdiff_t>(bad), x,
                                           [](Value v, const CMSample& s) { return v < s.value; });
        const CMSample& s = *(last - 1);
        resume(std::size_t{s.index} + 1, s.value, s.offset);
        if (current_ == x) return current_;
    }
    return seek_linear(x);
}

std::optional<Value> ListCursor::seek_st(Value x) {
    if (started_ && current_ >= x) return current_;
    const auto& st = *repr_->st;
    const std::size_t j = static_cast<std::size_t>(x >> st.shift);
    if (j >= st.buckets.size()) return std::nullopt;
    const STBucket& b = st.buckets[j];
    if (b.index >= repr_->length) return std::nullopt;
    if (b.index > reader_.consumed()) resume(b.index, b.prev, b.offset);
    return seek_linear(x);
}

std::optional<Value> ListCursor::seek(Value x) {
    if (repr_->kind == ReprKind::Bitmap) {
        if (started_ && current_ >= x) return current_;
        return bitmap_from(x);
    }
    if (use_samples_ && repr_->cm) return seek_cm(x);
    if (use_samples_ && repr_->st) return seek_st(x);
    return seek_linear(x);
}

bool ListCursor::probe(Value x) {
    if (repr_->kind == ReprKind::Bitmap && use_samples_) {
        ++extra_decoded_;
        return x <= repr_->universe && bit_set(repr_->bitmap, x);
    }
    const auto v = seek(x);
    return v && *v == x;
}

// ---- operations ---------------------------------------------------------

std::vector<Value> fetch(const ListRepr& repr, IntersectStats* stats) {
    ListCursor c(repr, false);
    std::vector<Value> out;
    out.reserve(repr.length);
    while (auto v = c.next()) out.push_back(*v);
    if (out.size() != repr.length) fail(ErrorCode::CorruptStream, "decoded length differs from header");
    if (stats) stats->decoded += c.decoded();
    return out;
}

std::optional<Value> next_geq(ListCursor& cursor, Value x) { return cursor.seek(x); }

std::vector<Value> intersect_merge_shifted(std::span<const ListRepr* const> lists, std::span<const Value> shifts,
                                           IntersectStats* stats) {
    check_same_universe(lists);
    std::vector<ListCursor> cursors;
    cursors.reserve(lists.size());
    for (const auto* l : lists) cursors.emplace_back(*l, false);
    auto out = leapfrog_intersect(std::span<ListCursor>(cursors), shifts);
    if (stats)
        for (const auto& c : cursors) stats->decoded += c.decoded();
    return out;
}

std::vector<Value> intersect_svs_shifted(std::span<const ListRepr* const> lists, std::span<const Value> shifts,
                                         IntersectStats* stats) {
    check_same_universe(lists);
    return probe_intersect(lists, shifts, stats);
}

std::vector<Value> intersect_lookup_shifted(std::span<const ListRepr* const> lists, std::span<const Value> shifts,
                                            IntersectStats* stats) {
    check_same_universe(lists);
    const auto order = order_by_length(lists);
    for (std::size_t i = 1; i < order.size(); ++i) {
        const ListRepr& l = *lists[order[i]];
        if (l.kind == ReprKind::Encoded && !l.st) fail(ErrorCode::MissingSamples, "lookup needs domain samples");
    }
    return probe_intersect(lists, shifts, stats);
}

std::vector<Value> intersect_merge(std::span<const ListRepr* const> lists, IntersectStats* stats) {
    const std::vector<Value> shifts(lists.size(), 0);
    return intersect_merge_shifted(lists, shifts, stats);
}

std::vector<Value> intersect_svs(std::span<const ListRepr* const> lists, IntersectStats* stats) {
    const std::vector<Value> shifts(lists.size(), 0);
    return intersect_svs_shifted(lists, shifts, stats);
}

std::vector<Value> intersect_lookup(std::span<const ListRepr* const> lists, IntersectStats* stats) {
    const std::vector<Value> shifts(lists.size(), 0);
    return intersect_lookup_shifted(lists, shifts, stats);
}

// ---- serialization ------------------------------------------------------

namespace {

template <class T, class F>
void put_column(ByteWriter& out, const std::vector<T>& rows, F field) {
    std::vector<std::uint64_t> col;
    col.reserve(rows.size());
    std::uint64_t max = 0;
    for (const auto& r : rows) max = std::max<std::uint64_t>(max, col.emplace_back(field(r)));
    out.packed(std::span<const std::uint64_t>(col), bit_width_of(max));
}

}  // namespace

void serialize(const ListRepr& r, ByteWriter& out) {
    out.uv(r.universe);
    out.uv(r.length);
    out.u8(static_cast<std::uint8_t>(static_cast<unsigned>(r.kind) | static_cast<unsigned>(r.codec) << 1 |
                                     static_cast<unsigned>(r.sampling()) << 4));
    if (r.kind == ReprKind::Bitmap) {
        out.u64_array(std::span<const std::uint64_t>(r.bitmap));
        return;
    }
    std::uint64_t param = 0;
    if (r.codec == CodecId::Rice || r.codec == CodecId::RiceRuns) param = r.params.rice.b;
    if (r.codec == CodecId::PforDelta) param = r.params.pfor.pfdThreshold;
    out.uv(param);
    out.uv(r.payload.size());
    out.bytes(r.payload);
    if (r.cm) {
        out.uv(r.cm->k);
        out.uv(r.cm->period);
        out.uv(r.cm->entries.size());
        put_column(out, r.cm->entries, [](const CMSample& s) { return s.index; });
        put_column(out, r.cm->entries, [](const CMSample& s) { return s.value; });
        put_column(out, r.cm->entries, [](const CMSample& s) { return s.offset; });
    } else if (r.st) {
        out.uv(r.st->B);
        out.uv(r.st->shift);
        out.uv(r.st->buckets.size());
        put_column(out, r.st->buckets, [](const STBucket& b) { return b.index; });
        put_column(out, r.st->buckets, [](const STBucket& b) { return b.offset; });
        put_column(out, r.st->buckets, [](const STBucket& b) { return b.prev; });
    }
}

ListRepr deserialize_list(ByteReader& in) {
    ListRepr r;
    r.universe = in.uv();
    const auto length = in.uv();
    const unsigned flags = in.u8();
    const unsigned kind = flags & 1, codec = flags >> 1 & 7, sampling = flags >> 4;
    if (codec > static_cast<unsigned>(CodecId::RiceRuns) || sampling > 2 || length > r.universe)
        fail(ErrorCode::CorruptStream, "bad list segment header");
    r.length = static_cast<std::size_t>(length);
    r.kind = static_cast<ReprKind>(kind);
    r.codec = static_cast<CodecId>(codec);
    if (r.kind == ReprKind::Bitmap) {
        const auto words = static_cast<std::size_t>(r.universe / 64 + 1);
        if (words > in.remaining() / 8) fail(ErrorCode::CorruptStream, "truncated segment");
        r.bitmap = in.u64_array<std::uint64_t>(words);
        return r;
    }
    const auto param = in.uv();
    if (param > 0xFFFF) fail(ErrorCode::CorruptStream, "bad codec parameter");
    if (r.codec == CodecId::Rice || r.codec == CodecId::RiceRuns) r.params.rice.b = static_cast<unsigned>(param);
    if (r.codec == CodecId::PforDelta) r.params.pfor.pfdThreshold = static_cast<std::size_t>(param);
    const auto payload = in.uv();
    if (payload > in.remaining()) fail(ErrorCode::CorruptStream, "truncated segment");
    const auto bytes = in.bytes(static_cast<std::size_t>(payload));
    r.payload.assign(bytes.begin(), bytes.end());
    auto count = [&] {
        const auto c = in.uv();
        if (c > in.remaining() * 8) fail(ErrorCode::CorruptStream, "truncated segment");
        return static_cast<std::size_t>(c);
    };
    if (sampling == static_cast<unsigned>(SamplingKind::CM)) {
        CMSamples cm;
        cm.k = static_cast<unsigned>(in.uv());
        cm.period = static_cast<std::size_t>(in.uv());
        const auto n = count();
        const auto idx = in.packed<std::uint32_t>(n);
        const auto val = in.packed<Value>(n);
        const auto off = in.packed<std::uint32_t>(n);
        for (std::size_t i = 0; i < n; ++i) cm.entries.push_back({idx[i], val[i], off[i]});
        r.cm = std::move(cm);
    } else if (sampling == static_cast<unsigned>(SamplingKind::ST)) {
        STSamples st;
        st.B = static_cast<unsigned>(in.uv());
        st.shift = static_cast<unsigned>(in.uv());
        if (st.shift > 63) fail(ErrorCode::CorruptStream, "bad bucket width");
        const auto n = count();
        const auto idx = in.packed<std::uint32_t>(n);
        const auto off = in.packed<std::uint32_t>(n);
        const auto prev = in.packed<Value>(n);
        for (std::size_t i = 0; i < n; ++i) st.buckets.push_back({idx[i], off[i], prev[i]});
        r.st = std::move(st);
    }
    return r;
}

}  // namespace hrdc
