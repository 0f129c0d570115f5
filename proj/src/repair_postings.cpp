#include "hrdc/repair_postings.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "hrdc/error.hpp"
#include "hrdc/postings.hpp"
#include "hrdc/repair.hpp"

namespace hrdc {

namespace {

constexpr Value kMaxTerminal = std::numeric_limits<Symbol>::max() - 2;

bool sampled(RePairVariant v) { return v == RePairVariant::SkipCM || v == RePairVariant::SkipST; }

void check_lists(const RePairPostings& rp, std::span<const std::size_t> lists, std::span<const Value> shifts) {
    if (lists.size() < 2) fail(ErrorCode::InvalidArgument, "intersection needs at least two lists");
    if (shifts.size() != lists.size()) fail(ErrorCode::InvalidArgument, "one shift per list");
    for (auto l : lists)
        if (l >= rp.list_count()) fail(ErrorCode::OutOfRange, "list index out of range");
}

}  // namespace

std::string_view to_string(RePairVariant v) noexcept {
    switch (v) {
        case RePairVariant::Plain: return "RePair";
        case RePairVariant::Skip: return "RePair-Skip";
        case RePairVariant::SkipCM: return "RePair-Skip-CM";
        case RePairVariant::SkipST: return "RePair-Skip-ST";
    }
    return "?";
}

// ---- grammar ------------------------------------------------------------

void compute_skips(RePairGrammar& g) {
    const std::size_t r = g.rule_count();
    g.sums.assign(r, 0);
    g.counts.assign(r, 0);
    for (std::size_t i = 0; i < r; ++i) {
        g.sums[i] = g.sum_of(g.lefts[i]) + g.sum_of(g.rights[i]);
        g.counts[i] = g.count_of(g.lefts[i]) + g.count_of(g.rights[i]);
    }
}

RePairGrammar repair_build(std::span<const std::vector<Value>> gap_lists, const RePairConfig& config) {
    require(config.repairBreak >= 0.0, ErrorCode::InvalidArgument, "repairBreak must be >= 0");
    std::size_t total = 0;
    Value max_gap = 0;
    for (const auto& gaps : gap_lists) {
        total += gaps.size() + 1;
        for (Value v : gaps) {
            if (v == 0) fail(ErrorCode::ReservedSymbol, "gap 0 is reserved for the separator");
            if (v > kMaxTerminal) fail(ErrorCode::ValueTooLarge, "gap does not fit a 32-bit symbol");
            max_gap = std::max(max_gap, v);
        }
    }
    std::vector<Symbol> symbols;
    symbols.reserve(total);
    for (const auto& gaps : gap_lists) {
        symbols.push_back(0);
        for (Value v : gaps) symbols.push_back(static_cast<Symbol>(v));
    }
    RePairGrammar g;
    g.first_rule = static_cast<Symbol>(max_gap + 1);
    RePairOptions opt;
    opt.first_rule = g.first_rule;
    opt.repair_break = config.repairBreak;
    opt.zero_separator = true;
    auto res = repair_compress(std::move(symbols), opt);
    g.original_length = res.original_length;
    g.lefts = std::move(res.lefts);
    g.rights = std::move(res.rights);
    g.sequence = std::move(res.sequence);
    for (std::size_t i = 0; i < g.sequence.size(); ++i)
        if (g.sequence[i] == 0) g.list_offsets.push_back(i + 1);
    compute_skips(g);
    return g;
}

std::vector<Value> expand(const RePairGrammar& g, Symbol s) {
    if (s == 0 || s >= g.first_rule + g.rule_count()) fail(ErrorCode::UnknownSymbol, "undefined symbol");
    std::vector<Value> out;
    std::vector<Symbol> stack{s};
    while (!stack.empty()) {
        const Symbol t = stack.back();
        stack.pop_back();
        if (!g.is_rule(t)) {
            out.push_back(t);
            continue;
        }
        stack.push_back(g.rights[t - g.first_rule]);
        stack.push_back(g.lefts[t - g.first_rule]);
    }
    return out;
}

// ---- variants -----------------------------------------------------------

RePairPostings rp_with_variant(RePairGrammar grammar, std::span<const std::uint32_t> lengths, Value universe,
                               RePairVariant variant, unsigned param) {
    RePairPostings rp;
    rp.grammar = std::move(grammar);
    rp.variant = variant;
    rp.param = sampled(variant) ? param : 0;
    rp.universe = universe;
    rp.lengths.assign(lengths.begin(), lengths.end());
    const RePairGrammar& g = rp.grammar;
    require(lengths.size() == g.list_count(), ErrorCode::InvalidArgument, "one length per list");
    if (variant == RePairVariant::SkipCM) require(param >= 1, ErrorCode::InvalidArgument, "CM needs k >= 1");
    if (variant == RePairVariant::SkipST) require(param >= 1, ErrorCode::InvalidArgument, "ST needs B >= 1");
    if (!sampled(variant)) return rp;

    for (std::size_t i = 0; i < g.list_count(); ++i) {
        rp.sample_starts.push_back(static_cast<std::uint32_t>(rp.samples.size()));
        const std::size_t len = lengths[i];
        const auto begin = g.list_offsets[i], end = g.list_end(i);
        std::uint32_t e = 0;
        Value prev = 0;
        if (variant == RePairVariant::SkipCM) {
            // every p-th top-level symbol of the list, the first one implied
            const std::size_t p = cm_period(param, len);
            for (auto pos = begin; pos < end; ++pos) {
                const Symbol s = g.sequence[pos];
                if (pos > begin && (pos - begin) % p == 0)
                    rp.samples.push_back({e, static_cast<std::uint32_t>(pos), prev});
                e += g.count_of(s);
                prev += g.sum_of(s);
            }
        } else if (len > 0) {
            const unsigned shift = st_shift(universe, param, len);
            const Value buckets = ((universe + (Value{1} << shift) - 1) >> shift) + 1;
            // bucket 0 is the list start and buckets past the last value are
            // implied, so only buckets 1..last are stored
            Value j = 1;
            for (auto pos = begin; pos < end; ++pos) {
                const Symbol s = g.sequence[pos];
                const Value hi = prev + g.sum_of(s);
                for (; j < buckets && (j << shift) <= hi; ++j)
                    rp.samples.push_back({e, static_cast<std::uint32_t>(pos), prev});
                e += g.count_of(s);
                prev = hi;
            }
        }
        require(e == len, ErrorCode::InvalidArgument, "list length mismatch");
    }
    rp.sample_starts.push_back(static_cast<std::uint32_t>(rp.samples.size()));
    return rp;
}

RePairPostings rp_build(std::span<const std::vector<Value>> lists, Value universe, RePairVariant variant,
                        unsigned param, const RePairConfig& config) {
    std::vector<std::vector<Value>> gaps;
    std::vector<std::uint32_t> lengths;
    gaps.reserve(lists.size());
    for (const auto& l : lists) {
        validate_list(l, universe);
        gaps.push_back(to_gaps(l));
        lengths.push_back(static_cast<std::uint32_t>(l.size()));
    }
    return rp_with_variant(repair_build(gaps, config), lengths, universe, variant, param);
}

// ---- cursor -------------------------------------------------------------

RePairCursor::RePairCursor(const RePairPostings& rp, std::size_t list, bool use_skips, bool use_samples)
    : rp_(&rp), g_(&rp.grammar), skips_(use_skips) {
    if (list >= rp.list_count()) fail(ErrorCode::OutOfRange, "list index out of range");
    pos_ = g_->list_offsets[list];
    end_ = g_->list_end(list);
    samples_ = use_samples && sampled(rp.variant) && !rp.sample_starts.empty();
    if (samples_) {
        const auto a = rp.sample_starts[list], b = rp.sample_starts[list + 1];
        dir_ = std::span<const RpSample>(rp.samples).subspan(a, b - a);
        if (rp.variant == RePairVariant::SkipST && rp.lengths[list] > 0)
            shift_ = st_shift(rp.universe, rp.param, rp.lengths[list]);
    }
}

std::optional<Value> RePairCursor::next() {
    while (true) {
        Symbol s;
        if (!stack_.empty()) {
            s = stack_.back();
            stack_.pop_back();
        } else if (pos_ < end_) {
            s = g_->sequence[pos_++];
        } else {
            return std::nullopt;
        }
        if (!g_->is_rule(s)) {
            running_ += s;
            ++index_;
            ++decoded_;
            started_ = true;
            return running_;
        }
        ++expanded_;
        stack_.push_back(g_->rights[s - g_->first_rule]);
        stack_.push_back(g_->lefts[s - g_->first_rule]);
    }
}

void RePairCursor::jump(Value x) {
    const RpSample* target = nullptr;
    if (rp_->variant == RePairVariant::SkipCM) {
        const auto it =
            std::partition_point(dir_.begin(), dir_.end(), [x](const RpSample& s) { return s.prev < x; });
        if (it != dir_.begin()) target = &*(it - 1);
    } else {
        const Value j = x >> shift_;
        if (j == 0) return;
        if (j > dir_.size()) {
            stack_.clear();
            pos_ = end_;
            return;
        }
        target = &dir_[j - 1];
    }
    if (!target || target->index <= index_) return;
    stack_.clear();
    pos_ = target->pos;
    running_ = target->prev;
    index_ = target->index;
}

std::optional<Value> RePairCursor::seek(Value x) {
    if (started_ && running_ >= x) return running_;
    if (samples_) jump(x);
    if (!skips_) {
        while (auto v = next())
            if (*v >= x) return v;
        return std::nullopt;
    }
    while (true) {
        Symbol s;
        if (!stack_.empty()) {
            s = stack_.back();
            stack_.pop_back();
        } else if (pos_ < end_) {
            s = g_->sequence[pos_++];
        } else {
            return std::nullopt;
        }
        if (!g_->is_rule(s)) {
            running_ += s;
            ++index_;
            ++decoded_;
            if (running_ >= x) {
                started_ = true;
                return running_;
            }
            continue;
        }
        const std::size_t r = s - g_->first_rule;
        if (running_ + g_->sums[r] < x) {
            running_ += g_->sums[r];
            index_ += g_->counts[r];
            continue;
        }
        ++expanded_;
        stack_.push_back(g_->rights[r]);
        stack_.push_back(g_->lefts[r]);
    }
}

bool RePairCursor::probe(Value x) {
    const auto v = seek(x);
    return v && *v == x;
}

// ---- operations ---------------------------------------------------------

std::vector<Value> rp_fetch(const RePairPostings& rp, std::size_t list, IntersectStats* stats) {
    RePairCursor c(rp, list, false, false);
    std::vector<Value> out;
    out.reserve(rp.lengths[list]);
    while (auto v = c.next()) out.push_back(*v);
    if (stats) {
        stats->decoded += c.decoded();
        stats->expanded += c.expanded();
    }
    return out;
}

std::vector<Value> rp_intersect_shifted(const RePairPostings& rp, std::span<const std::size_t> lists,
                                        std::span<const Value> shifts, IntersectStats* stats) {
    check_lists(rp, lists, shifts);
    const bool skips = rp.variant != RePairVariant::Plain;
    std::vector<RePairCursor> cursors;
    std::vector<Value> out;
    if (!sampled(rp.variant)) {
        for (auto l : lists) cursors.emplace_back(rp, l, skips, false);
        out = leapfrog_intersect(std::span<RePairCursor>(cursors), shifts);
    } else {
        std::vector<std::size_t> order(lists.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rp.lengths[lists[a]] < rp.lengths[lists[b]]; });
        cursors.emplace_back(rp, lists[order[0]], true, false);
        out = drain_shifted(cursors.back(), shifts[order[0]]);
        for (std::size_t i = 1; i < order.size() && !out.empty(); ++i) {
            cursors.emplace_back(rp, lists[order[i]], true, true);
            out = filter_candidates(std::span<const Value>(out), cursors.back(), shifts[order[i]]);
        }
    }
    if (stats)
        for (const auto& c : cursors) {
            stats->decoded += c.decoded();
            stats->expanded += c.expanded();
        }
    return out;
}

std::vector<Value> rp_intersect(const RePairPostings& rp, std::span<const std::size_t> lists, IntersectStats* stats) {
    const std::vector<Value> shifts(lists.size(), 0);
    return rp_intersect_shifted(rp, lists, shifts, stats);
}

// ---- serialization ------------------------------------------------------

namespace {

template <class T>
void put_packed(ByteWriter& out, const std::vector<T>& xs) {
    std::uint64_t max = 0;
    for (auto x : xs) max = std::max<std::uint64_t>(max, x);
    out.packed(std::span<const T>(xs), bit_width_of(max));
}

}  // namespace

void serialize(const RePairPostings& rp, ByteWriter& out) {
    const RePairGrammar& g = rp.grammar;
    out.u8(static_cast<std::uint8_t>(rp.variant));
    out.uv(rp.param);
    out.uv(rp.universe);
    out.uv(g.original_length);
    out.uv(g.sequence.size());
    out.uv(g.rule_count());
    out.uv(rp.list_count());
    out.uv(g.first_rule);
    put_packed(out, g.lefts);
    put_packed(out, g.rights);
    if (rp.variant != RePairVariant::Plain) {
        put_packed(out, g.sums);
        put_packed(out, g.counts);
    }
    put_packed(out, g.sequence);
    put_packed(out, g.list_offsets);
    put_packed(out, rp.lengths);
    if (sampled(rp.variant)) {
        put_packed(out, rp.sample_starts);
        std::vector<std::uint64_t> idx, pos, prev;
        for (const auto& s : rp.samples) {
            idx.push_back(s.index);
            pos.push_back(s.pos);
            prev.push_back(s.prev);
        }
        put_packed(out, idx);
        put_packed(out, pos);
        put_packed(out, prev);
    }
}

RePairPostings deserialize_repair(ByteReader& in) {
    RePairPostings rp;
    RePairGrammar& g = rp.grammar;
    const auto variant = in.u8();
    if (variant > 3) fail(ErrorCode::CorruptStream, "unknown RePair variant");
    rp.variant = static_cast<RePairVariant>(variant);
    const auto param = in.uv();
    if (param > std::numeric_limits<std::uint32_t>::max()) fail(ErrorCode::CorruptStream, "bad parameter");
    rp.param = static_cast<std::uint32_t>(param);
    rp.universe = in.uv();
    g.original_length = in.uv();
    auto count = [&] {
        const auto c = in.uv();
        if (c > in.remaining() * 8) fail(ErrorCode::CorruptStream, "truncated segment");
        return static_cast<std::size_t>(c);
    };
    const std::size_t m = count();
    const std::size_t rules = count();
    const std::size_t lists = count();
    const auto first = in.uv();
    if (first > std::numeric_limits<Symbol>::max() - rules) fail(ErrorCode::CorruptStream, "bad first rule");
    g.first_rule = static_cast<Symbol>(first);
    g.lefts = in.packed<Symbol>(rules);
    g.rights = in.packed<Symbol>(rules);
    for (std::size_t i = 0; i < rules; ++i)
        if (g.lefts[i] >= g.first_rule + i || g.rights[i] >= g.first_rule + i || g.lefts[i] == 0 ||
            g.rights[i] == 0)
            fail(ErrorCode::CorruptStream, "rule refers to an undefined symbol");
    if (rp.variant != RePairVariant::Plain) {
        g.sums = in.packed<Value>(rules);
        g.counts = in.packed<std::uint32_t>(rules);
    } else {
        compute_skips(g);
    }
    g.sequence = in.packed<Symbol>(m);
    g.list_offsets = in.packed<std::uint64_t>(lists);
    for (std::size_t i = 0; i < lists; ++i)
        if (g.list_offsets[i] == 0 || g.list_offsets[i] > m || g.sequence[g.list_offsets[i] - 1] != 0 ||
            (i > 0 && g.list_offsets[i] <= g.list_offsets[i - 1]))
            fail(ErrorCode::CorruptStream, "bad list offset");
    for (Symbol s : g.sequence)
        if (s >= g.first_rule + rules) fail(ErrorCode::CorruptStream, "sequence refers to an undefined symbol");
    rp.lengths = in.packed<std::uint32_t>(lists);
    if (sampled(rp.variant)) {
        rp.sample_starts = in.packed<std::uint32_t>(lists + 1);
        const std::size_t n = rp.sample_starts.back();
        for (std::size_t i = 0; i < lists; ++i)
            if (rp.sample_starts[i] > rp.sample_starts[i + 1]) fail(ErrorCode::CorruptStream, "bad sample directory");
        if (n > in.remaining() * 8) fail(ErrorCode::CorruptStream, "truncated segment");
        const auto idx = in.packed<std::uint32_t>(n);
        const auto pos = in.packed<std::uint32_t>(n);
        const auto prev = in.packed<Value>(n);
        rp.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            rp.samples[i].index = idx[i];
            rp.samples[i].pos = pos[i];
            rp.samples[i].prev = prev[i];
            if (pos[i] > m) fail(ErrorCode::CorruptStream, "sample beyond the sequence");
        }
    }
    return rp;
}

}  // namespace hrdc
