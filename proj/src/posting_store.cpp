#include "hrdc/posting_store.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "hrdc/error.hpp"
#include "hrdc/lz_postings.hpp"
#include "hrdc/postings.hpp"

namespace hrdc {

namespace {

constexpr char kMagic[8] = {'H', 'R', 'D', 'C', 'P', 'S', 'T', '1'};

enum class Family : std::uint8_t { Codec = 0, VLz = 1, LzEnd = 2, RePair = 3 };
enum class Algorithm : std::uint8_t { Merge = 0, SvS = 1, Lookup = 2 };

struct MethodInfo {
    const char* name;
    Family family;
    CodecId codec;
    Algorithm algorithm;
    SamplingKind sampling;
    bool bitmaps;
    RePairVariant variant;
};

const std::vector<MethodInfo>& registry() {
    using C = CodecId;
    using A = Algorithm;
    using S = SamplingKind;
    using V = RePairVariant;
    static const std::vector<MethodInfo> r = {
        {"Vbyte", Family::Codec, C::Vbyte, A::Merge, S::None, false, V::Plain},
        {"VbyteB", Family::Codec, C::Vbyte, A::Merge, S::None, true, V::Plain},
        {"Vbyte-CM", Family::Codec, C::Vbyte, A::SvS, S::CM, false, V::Plain},
        {"Vbyte-CMB", Family::Codec, C::Vbyte, A::SvS, S::CM, true, V::Plain},
        {"Vbyte-ST", Family::Codec, C::Vbyte, A::Lookup, S::ST, false, V::Plain},
        {"Vbyte-STB", Family::Codec, C::Vbyte, A::Lookup, S::ST, true, V::Plain},
        {"Rice", Family::Codec, C::Rice, A::Merge, S::None, false, V::Plain},
        {"RiceB", Family::Codec, C::Rice, A::Merge, S::None, true, V::Plain},
        {"Simple9", Family::Codec, C::Simple9, A::Merge, S::None, false, V::Plain},
        {"PforDelta", Family::Codec, C::PforDelta, A::Merge, S::None, false, V::Plain},
        {"Rice-Runs", Family::Codec, C::RiceRuns, A::Merge, S::None, false, V::Plain},
        {"Vbyte-LZMA", Family::VLz, C::Vbyte, A::Merge, S::None, false, V::Plain},
        {"Vbyte-Lzend", Family::LzEnd, C::Vbyte, A::Merge, S::None, false, V::Plain},
        {"RePair", Family::RePair, C::Vbyte, A::Merge, S::None, false, V::Plain},
        {"RePair-Skip", Family::RePair, C::Vbyte, A::Merge, S::None, false, V::Skip},
        {"RePair-Skip-CM", Family::RePair, C::Vbyte, A::SvS, S::None, false, V::SkipCM},
        {"RePair-Skip-ST", Family::RePair, C::Vbyte, A::SvS, S::None, false, V::SkipST},
    };
    return r;
}

const MethodInfo& info(std::string_view name) {
    for (const auto& m : registry())
        if (name == m.name) return m;
    fail(ErrorCode::InvalidArgument, "unknown method " + std::string(name));
}

unsigned parse_uint(const std::string& key, const std::string& v) {
    unsigned out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || out == 0)
        fail(ErrorCode::InvalidArgument, key + " must be a positive integer");
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || !(out >= 0.0)) fail(ErrorCode::InvalidArgument, key + " must be a non-negative number");
    return out;
}

std::string format_double(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

void write_config(const MethodConfig& c, ByteWriter& out) {
    out.u16(static_cast<std::uint16_t>(c.name.size()));
    out.bytes(std::span(reinterpret_cast<const std::uint8_t*>(c.name.data()), c.name.size()));
    for (unsigned v : {c.k, c.B, c.len_bitmap_div, c.pfd_threshold, c.ds, c.minbcssize}) out.u32(v);
    out.f64(c.repair_break);
}

MethodConfig read_config(ByteReader& in) {
    MethodConfig c;
    const auto name = in.bytes(in.u16());
    c.name.assign(name.begin(), name.end());
    info(c.name);
    for (unsigned* v : {&c.k, &c.B, &c.len_bitmap_div, &c.pfd_threshold, &c.ds, &c.minbcssize}) *v = in.u32();
    c.repair_break = in.f64();
    return c;
}

void check_terms(std::size_t count, std::span<const std::size_t> terms, std::span<const Value> shifts) {
    if (terms.size() < 2) fail(ErrorCode::InvalidArgument, "intersection needs at least two lists");
    if (shifts.size() != terms.size()) fail(ErrorCode::InvalidArgument, "one shift per list");
    for (auto t : terms)
        if (t >= count) fail(ErrorCode::OutOfRange, "term id out of range");
}

// ---- families --------------------------------------------------------------

class CodecStore final : public PostingStore {
public:
    CodecStore(MethodConfig c, Value u, std::vector<ListRepr> lists)
        : config_(std::move(c)), universe_(u), lists_(std::move(lists)) {}

    const MethodConfig& config() const override { return config_; }
    std::size_t list_count() const override { return lists_.size(); }
    Value universe() const override { return universe_; }

    std::vector<Value> fetch(std::size_t t, IntersectStats* stats) const override {
        if (t >= lists_.size()) fail(ErrorCode::OutOfRange, "term id out of range");
        return hrdc::fetch(lists_[t], stats);
    }

    std::vector<Value> intersect(std::span<const std::size_t> terms, std::span<const Value> shifts,
                                 IntersectStats* stats) const override {
        check_terms(lists_.size(), terms, shifts);
        std::vector<const ListRepr*> ptrs;
        for (auto t : terms) ptrs.push_back(&lists_[t]);
        switch (info(config_.name).algorithm) {
            case Algorithm::SvS: return intersect_svs_shifted(ptrs, shifts, stats);
            case Algorithm::Lookup: return intersect_lookup_shifted(ptrs, shifts, stats);
            case Algorithm::Merge: break;
        }
        return intersect_merge_shifted(ptrs, shifts, stats);
    }

    static std::unique_ptr<PostingStore> load(MethodConfig c, ByteReader& in) {
        const Value u = in.u64();
        const std::uint64_t n = in.u64();
        std::vector<ListRepr> lists;
        for (std::uint64_t i = 0; i < n; ++i) {
            lists.push_back(deserialize_list(in));
            if (lists.back().universe != u) fail(ErrorCode::CorruptStream, "list universe differs from the store");
        }
        return std::make_unique<CodecStore>(std::move(c), u, std::move(lists));
    }

protected:
    void serialize_body(ByteWriter& out) const override {
        out.u64(universe_);
        out.u64(lists_.size());
        for (const auto& l : lists_) hrdc::serialize(l, out);
    }

private:
    MethodConfig config_;
    Value universe_;
    std::vector<ListRepr> lists_;
};

// Lists materialized as Vbyte streams, then merged.
template <class Index, ListRepr (*List)(const Index&, std::size_t), std::vector<Value> (*Fetch)(const Index&, std::size_t)>
class MaterializingStore : public PostingStore {
public:
    MaterializingStore(MethodConfig c, Index idx) : config_(std::move(c)), idx_(std::move(idx)) {}

    const MethodConfig& config() const override { return config_; }
    std::size_t list_count() const override { return idx_.list_count(); }
    Value universe() const override { return idx_.universe; }

    std::vector<Value> fetch(std::size_t t, IntersectStats* stats) const override {
        auto v = Fetch(idx_, t);
        if (stats) stats->decoded += v.size();
        return v;
    }

    std::vector<Value> intersect(std::span<const std::size_t> terms, std::span<const Value> shifts,
                                 IntersectStats* stats) const override {
        check_terms(idx_.list_count(), terms, shifts);
        std::vector<ListRepr> reprs;
        reprs.reserve(terms.size());
        for (auto t : terms) reprs.push_back(List(idx_, t));
        std::vector<const ListRepr*> ptrs;
        for (const auto& r : reprs) ptrs.push_back(&r);
        return intersect_merge_shifted(ptrs, shifts, stats);
    }

protected:
    void serialize_body(ByteWriter& out) const override { hrdc::serialize(idx_, out); }

private:
    MethodConfig config_;
    Index idx_;
};

using VLzStore = MaterializingStore<VLzIndex, vlz_list, vlz_fetch>;
using LzEndStore = MaterializingStore<LzEndPostings, lzend_list, lzend_fetch>;

class RePairStore final : public PostingStore {
public:
    RePairStore(MethodConfig c, RePairPostings rp) : config_(std::move(c)), rp_(std::move(rp)) {}

    const MethodConfig& config() const override { return config_; }
    std::size_t list_count() const override { return rp_.list_count(); }
    Value universe() const override { return rp_.universe; }

    std::vector<Value> fetch(std::size_t t, IntersectStats* stats) const override { return rp_fetch(rp_, t, stats); }

    std::vector<Value> intersect(std::span<const std::size_t> terms, std::span<const Value> shifts,
                                 IntersectStats* stats) const override {
        check_terms(rp_.list_count(), terms, shifts);
        return rp_intersect_shifted(rp_, terms, shifts, stats);
    }

protected:
    void serialize_body(ByteWriter& out) const override { hrdc::serialize(rp_, out); }

private:
    MethodConfig config_;
    RePairPostings rp_;
};

}  // namespace

std::string_view to_string(Scenario s) noexcept { return s == Scenario::Positional ? "pos" : "nonpos"; }

Scenario scenario_from_string(std::string_view s) {
    if (s == "pos") return Scenario::Positional;
    if (s == "nonpos") return Scenario::NonPositional;
    fail(ErrorCode::InvalidArgument, "scenario must be pos or nonpos");
}

const std::vector<std::string>& method_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& m : registry()) v.emplace_back(m.name);
        return v;
    }();
    return names;
}

std::vector<MethodConfig> configuration_grid(Scenario scenario) {
    static const std::map<std::string, std::vector<std::map<std::string, std::string>>> extra = {
        {"Vbyte-CM", {{{"k", "4"}}}},      {"Vbyte-CMB", {{{"k", "4"}}}},
        {"Vbyte-ST", {{{"B", "16"}}}},     {"Vbyte-STB", {{{"B", "16"}}}},
        {"Vbyte-Lzend", {{{"ds", "64"}}, {{"ds", "16"}}, {{"ds", "4"}}}},
        {"RePair-Skip-CM", {{{"k", "1"}}}},
    };
    std::vector<MethodConfig> out;
    for (const auto& name : method_names()) {
        out.push_back(method_config(name, {}, scenario));
        if (const auto it = extra.find(name); it != extra.end())
            for (const auto& params : it->second) out.push_back(method_config(name, params, scenario));
    }
    return out;
}

MethodConfig method_config(std::string_view name, const std::map<std::string, std::string>& params,
                           Scenario scenario) {
    const MethodInfo& m = info(name);
    const bool pos = scenario == Scenario::Positional;
    MethodConfig c;
    c.name = m.name;
    std::vector<std::string> allowed;
    if (m.family == Family::Codec) {
        if (m.sampling == SamplingKind::CM) {
            c.k = 32;
            allowed.push_back("k");
        }
        if (m.sampling == SamplingKind::ST) {
            c.B = 128;
            allowed.push_back("B");
        }
        if (m.bitmaps) {
            c.len_bitmap_div = 8;
            allowed.push_back("lenBitmapDiv");
        }
        if (m.codec == CodecId::PforDelta) allowed.push_back("pfdThreshold");
    } else if (m.family == Family::VLz) {
        c.minbcssize = static_cast<unsigned>(kDefaultMinBcsSize);
        allowed.push_back("minbcssize");
    } else if (m.family == Family::LzEnd) {
        c.ds = 256;
        allowed.push_back("ds");
    } else if (m.variant != RePairVariant::Plain) {
        c.repair_break = pos ? 5e-7 : 4e-7;
        allowed.push_back("repairBreak");
        if (m.variant == RePairVariant::SkipCM) {
            c.k = 64;
            allowed.push_back("k");
        }
        if (m.variant == RePairVariant::SkipST) {
            c.B = pos ? 256 : 1024;
            allowed.push_back("B");
        }
    }
    for (const auto& [key, value] : params) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(ErrorCode::InvalidArgument, "method " + c.name + " takes no parameter " + key);
        if (key == "k") c.k = parse_uint(key, value);
        else if (key == "B") c.B = parse_uint(key, value);
        else if (key == "lenBitmapDiv") c.len_bitmap_div = parse_uint(key, value);
        else if (key == "pfdThreshold") c.pfd_threshold = parse_uint(key, value);
        else if (key == "minbcssize") c.minbcssize = parse_uint(key, value);
        else if (key == "ds") c.ds = parse_uint(key, value);
        else if (key == "repairBreak") c.repair_break = parse_double(key, value);
    }
    if (c.pfd_threshold > kMaxPforBlock) fail(ErrorCode::InvalidArgument, "pfdThreshold must be <= 4096");
    return c;
}

std::string MethodConfig::parameterization() const {
    std::vector<std::string> parts;
    if (k) parts.push_back("k=" + std::to_string(k));
    if (B) parts.push_back("B=" + std::to_string(B));
    if (len_bitmap_div) parts.push_back("lenBitmapDiv=" + std::to_string(len_bitmap_div));
    if (name == "PforDelta") parts.push_back("pfdThreshold=" + std::to_string(pfd_threshold));
    if (minbcssize) parts.push_back("minbcssize=" + std::to_string(minbcssize));
    if (ds) parts.push_back("ds=" + std::to_string(ds));
    if (info(name).family == Family::RePair && info(name).variant != RePairVariant::Plain)
        parts.push_back("repairBreak=" + format_double(repair_break));
    if (parts.empty()) return "x";
    std::string s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += ", " + parts[i];
    return s;
}

std::string MethodConfig::label() const {
    std::string p = parameterization();
    if (p == "x") return name;
    p.erase(std::remove(p.begin(), p.end(), ' '), p.end());
    return name + ":" + p;
}

void PostingStore::serialize(ByteWriter& out) const {
    out.bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), sizeof kMagic));
    out.u8(static_cast<std::uint8_t>(info(config().name).family));
    write_config(config(), out);
    serialize_body(out);
}

std::unique_ptr<PostingStore> load_store(ByteReader& in) {
    const auto magic = in.bytes(sizeof kMagic);
    if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const std::uint8_t*>(kMagic)))
        fail(ErrorCode::CorruptStream, "not a posting store");
    const auto family = static_cast<Family>(in.u8());
    MethodConfig c = read_config(in);
    if (info(c.name).family != family) fail(ErrorCode::CorruptStream, "family does not match the method");
    switch (family) {
        case Family::Codec: return CodecStore::load(std::move(c), in);
        case Family::VLz: return std::make_unique<VLzStore>(std::move(c), deserialize_vlz(in));
        case Family::LzEnd: return std::make_unique<LzEndStore>(std::move(c), deserialize_lzend(in));
        case Family::RePair: {
            auto rp = deserialize_repair(in);
            if (rp.variant != info(c.name).variant) fail(ErrorCode::CorruptStream, "variant does not match the method");
            return std::make_unique<RePairStore>(std::move(c), std::move(rp));
        }
    }
    fail(ErrorCode::CorruptStream, "unknown store family");
}

// ---- builder ---------------------------------------------------------------

StoreBuilder::StoreBuilder(std::span<const std::vector<Value>> lists, Value universe)
    : lists_(lists), universe_(universe) {
    for (const auto& l : lists) {
        validate_list(l, universe);
        lengths_.push_back(static_cast<std::uint32_t>(l.size()));
    }
}

StoreBuilder::~StoreBuilder() = default;

std::unique_ptr<PostingStore> StoreBuilder::build(const MethodConfig& c) {
    const MethodInfo& m = info(c.name);
    switch (m.family) {
        case Family::Codec: {
            Sampling s;
            if (m.sampling == SamplingKind::CM) s = Sampling::cm(c.k);
            if (m.sampling == SamplingKind::ST) s = Sampling::st(c.B);
            std::optional<HybridConfig> hybrid;
            if (m.bitmaps) hybrid = HybridConfig{c.len_bitmap_div};
            CodecParams base;
            base.pfor.pfdThreshold = c.pfd_threshold;
            std::vector<ListRepr> reprs;
            reprs.reserve(lists_.size());
            for (const auto& l : lists_) reprs.push_back(build_list(l, universe_, m.codec, s, hybrid, base));
            return std::make_unique<CodecStore>(c, universe_, std::move(reprs));
        }
        case Family::VLz: return std::make_unique<VLzStore>(c, vlz_build(lists_, universe_, c.minbcssize));
        case Family::LzEnd: {
            if (!lzend_) {
                const auto all = lzend_concat(lists_, universe_, lzend_offsets_);
                lzend_ = all.empty() ? LzEndParse{} : lzend_parse(all);
            }
            return std::make_unique<LzEndStore>(c, lzend_store(*lzend_, lengths_, lzend_offsets_, universe_, c.ds));
        }
        case Family::RePair: {
            auto it = grammars_.find(c.repair_break);
            if (it == grammars_.end()) {
                std::vector<std::vector<Value>> gaps;
                gaps.reserve(lists_.size());
                for (const auto& l : lists_) gaps.push_back(to_gaps(l));
                it = grammars_.emplace(c.repair_break, repair_build(gaps, RePairConfig{c.repair_break})).first;
            }
            const unsigned param = m.variant == RePairVariant::SkipCM ? c.k : c.B;
            return std::make_unique<RePairStore>(
                c, rp_with_variant(it->second, lengths_, universe_, m.variant, param));
        }
    }
    fail(ErrorCode::InvalidArgument, "unknown method family");
}

}  // namespace hrdc
