#include "hrdc/gap_codecs.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "hrdc/error.hpp"

namespace hrdc {

namespace {

unsigned ceil_log2(Value x) {
    if (x <= 1) return 0;
    return static_cast<unsigned>(64 - std::countl_zero(x - 1));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t w) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& pos) {
    if (in.size() < 4 || pos > in.size() - 4) fail(ErrorCode::CorruptStream, "truncated 32-bit word");
    std::uint32_t w = 0;
    for (int i = 0; i < 4; ++i) w |= std::uint32_t{in[pos + i]} << (8 * i);
    pos += 4;
    return w;
}

void check_gaps(std::span<const Value> gaps) {
    for (Value g : gaps)
        if (g == 0) fail(ErrorCode::InvalidGaps, "gap must be >= 1");
}

void rice_put(BitWriter& w, Value v, unsigned b) {
    const Value x = v - 1;
    w.unary(x >> b);
    w.bits(x, b);
}

Value rice_get(BitReader& r, unsigned b) {
    const Value q = r.unary();
    if (b < 64 && q > (std::numeric_limits<Value>::max() >> b)) fail(ErrorCode::CorruptStream, "rice quotient overflow");
    const Value x = (q << b) | r.bits(b);
    if (x == std::numeric_limits<Value>::max()) fail(ErrorCode::CorruptStream, "rice value overflow");
    return x + 1;
}

void check_rice(const CodecParams& p) {
    if (p.rice.b > kMaxRiceWidth) fail(ErrorCode::InvalidArgument, "rice width must be <= 62");
}

void check_pfor(const CodecParams& p) {
    if (p.pfor.pfdThreshold < 1 || p.pfor.pfdThreshold > kMaxPforBlock)
        fail(ErrorCode::InvalidArgument, "pfdThreshold must be in [1, 4096]");
}

// ---- PforDelta ----------------------------------------------------------
//
// Block: b(1) reserved(1) exceptions(2, LE) | len*b bits packed LSB-first in
// 32-bit LE words | Simple9 words holding (position delta, high bits) pairs.

unsigned pfor_width(std::span<const Value> xs) {
    const std::size_t len = xs.size();
    for (unsigned b = 0; b <= 28; ++b) {
        std::size_t fit = 0;
        for (Value x : xs) fit += (x >> b) == 0;
        if (fit * 10 >= len * 9) return b;
    }
    return 28;
}

void pfor_encode_block(std::span<const Value> gaps, std::vector<std::uint8_t>& out) {
    std::vector<Value> xs(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (gaps[i] - 1 >= kSimple9Limit) fail(ErrorCode::ValueTooLarge, "PforDelta gap exceeds 2^28");
        xs[i] = gaps[i] - 1;
    }
    const unsigned b = pfor_width(xs);
    std::vector<Value> exceptions;
    std::size_t last = 0;
    bool first = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if ((xs[i] >> b) != 0) {
            exceptions.push_back(first ? i + 1 : i - last);
            exceptions.push_back(xs[i] >> b);
            last = i;
            first = false;
        }
    }
    out.push_back(static_cast<std::uint8_t>(b));
    out.push_back(0);
    const std::size_t exc = exceptions.size() / 2;
    out.push_back(static_cast<std::uint8_t>(exc));
    out.push_back(static_cast<std::uint8_t>(exc >> 8));

    const std::size_t words = (xs.size() * b + 31) / 32;
    std::vector<std::uint32_t> packed(words, 0);
    const Value mask = b == 0 ? 0 : ((Value{1} << b) - 1);
    for (std::size_t i = 0; b > 0 && i < xs.size(); ++i) {
        const Value low = xs[i] & mask;
        const std::size_t bit = i * b;
        const std::size_t w = bit / 32;
        const unsigned off = bit % 32;
        packed[w] |= static_cast<std::uint32_t>(low << off);
        if (off + b > 32) packed[w + 1] |= static_cast<std::uint32_t>(low >> (32 - off));
    }
    for (auto w : packed) put_u32(out, w);
    simple9::encode_words(exceptions, out);
}

void pfor_decode_block(std::span<const std::uint8_t> in, std::size_t& pos, std::size_t len, std::vector<Value>& out) {
    if (in.size() < 4 || pos > in.size() - 4) fail(ErrorCode::CorruptStream, "truncated PforDelta block header");
    const unsigned b = in[pos];
    const std::size_t exc = std::size_t{in[pos + 2]} | (std::size_t{in[pos + 3]} << 8);
    pos += 4;
    if (b > 28) fail(ErrorCode::CorruptStream, "PforDelta width out of range");
    if (exc > len) fail(ErrorCode::CorruptStream, "PforDelta exception count exceeds block");
    const std::size_t words = (len * b + 31) / 32;
    std::vector<std::uint32_t> packed(words + 1, 0);
    for (std::size_t w = 0; w < words; ++w) packed[w] = get_u32(in, pos);
    const std::size_t base = out.size();
    const Value mask = b == 0 ? 0 : ((Value{1} << b) - 1);
    for (std::size_t i = 0; i < len; ++i) {
        const std::size_t bit = i * b;
        const std::size_t w = bit / 32;
        const unsigned off = bit % 32;
        Value v = Value{packed[w]} >> off;
        if (off + b > 32) v |= Value{packed[w + 1]} << (32 - off);
        out.push_back(v & mask);
    }
    if (exc > 0) {
        std::vector<Value> pairs;
        simple9::decode_words(in, pos, exc * 2, pairs);
        std::size_t at = 0;
        for (std::size_t e = 0; e < exc; ++e) {
            at = e == 0 ? pairs[0] - 1 : at + pairs[2 * e];
            if (at >= len) fail(ErrorCode::CorruptStream, "PforDelta exception position out of block");
            out[base + at] |= pairs[2 * e + 1] << b;
        }
    }
    for (std::size_t i = base; i < out.size(); ++i) out[i] += 1;
}

}  // namespace

std::string_view to_string(CodecId codec) noexcept {
    switch (codec) {
        case CodecId::Vbyte: return "Vbyte";
        case CodecId::Rice: return "Rice";
        case CodecId::Simple9: return "Simple9";
        case CodecId::PforDelta: return "PforDelta";
        case CodecId::RiceRuns: return "RiceRuns";
    }
    return "?";
}

CodecId codec_from_string(std::string_view name) {
    for (auto c : {CodecId::Vbyte, CodecId::Rice, CodecId::Simple9, CodecId::PforDelta, CodecId::RiceRuns})
        if (to_string(c) == name) return c;
    fail(ErrorCode::InvalidArgument, "unknown codec " + std::string(name));
}

void validate_list(std::span<const Value> values, Value universe) {
    if (!values.empty() && values.front() < 1) fail(ErrorCode::InvalidList, "values must be >= 1");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1]) fail(ErrorCode::InvalidList, "values must be strictly increasing");
    if (!values.empty() && values.back() > universe) fail(ErrorCode::InvalidList, "value exceeds universe");
}

std::vector<Value> to_gaps(std::span<const Value> values) {
    std::vector<Value> gaps(values.size());
    Value prev = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] <= prev) fail(ErrorCode::InvalidList, "values must be >= 1 and strictly increasing");
        gaps[i] = values[i] - prev;
        prev = values[i];
    }
    return gaps;
}

std::vector<Value> from_gaps(std::span<const Value> gaps) {
    std::vector<Value> values(gaps.size());
    Value acc = 0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (gaps[i] == 0) fail(ErrorCode::InvalidGaps, "gap must be >= 1");
        acc += gaps[i];
        values[i] = acc;
    }
    return values;
}

namespace vbyte {

void put(Value v, std::vector<std::uint8_t>& out) {
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v & 0x7F));
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
}

Value get(std::span<const std::uint8_t> in, std::size_t& pos) {
    Value v = 0;
    unsigned shift = 0;
    while (true) {
        if (pos >= in.size()) fail(ErrorCode::CorruptStream, "truncated vbyte value");
        const std::uint8_t byte = in[pos++];
        if (shift > 63) fail(ErrorCode::CorruptStream, "vbyte value overflow");
        v |= Value{static_cast<std::uint8_t>(byte & 0x7F)} << shift;
        if (byte & 0x80) return v;
        shift += 7;
    }
}

std::size_t encoded_size(Value v) noexcept {
    std::size_t n = 1;
    while (v >= 0x80) {
        v >>= 7;
        ++n;
    }
    return n;
}

}  // namespace vbyte

namespace simple9 {

void encode_words(std::span<const Value> values, std::vector<std::uint8_t>& out) {
    std::size_t i = 0;
    const std::size_t n = values.size();
    while (i < n) {
        bool packed = false;
        for (std::uint32_t sel = 0; sel < kCases.size(); ++sel) {
            const auto [count, width] = kCases[sel];
            const std::size_t take = std::min<std::size_t>(count, n - i);
            bool fits = true;
            for (std::size_t j = 0; j < take && fits; ++j) {
                const Value v = values[i + j];
                if (v == 0) fail(ErrorCode::InvalidGaps, "gap must be >= 1");
                if (v - 1 >= kSimple9Limit) fail(ErrorCode::ValueTooLarge, "Simple9 gap exceeds 2^28");
                fits = ((v - 1) >> width) == 0;
            }
            if (!fits) continue;
            std::uint32_t word = sel << 28;
            for (std::size_t j = 0; j < take; ++j)
                word |= static_cast<std::uint32_t>(values[i + j] - 1) << (j * width);
            put_u32(out, word);
            i += take;
            packed = true;
            break;
        }
        if (!packed) fail(ErrorCode::ValueTooLarge, "Simple9 gap exceeds 2^28");
    }
}

void decode_words(std::span<const std::uint8_t> in, std::size_t& pos, std::size_t n, std::vector<Value>& out) {
    std::size_t got = 0;
    while (got < n) {
        const std::uint32_t word = get_u32(in, pos);
        const std::uint32_t sel = word >> 28;
        if (sel >= kCases.size()) fail(ErrorCode::CorruptStream, "invalid Simple9 selector");
        const auto [count, width] = kCases[sel];
        const std::uint32_t mask = (width == 32) ? ~0u : ((1u << width) - 1);
        for (unsigned j = 0; j < count && got < n; ++j, ++got) out.push_back(Value{(word >> (j * width)) & mask} + 1);
    }
}

}  // namespace simple9

std::uint64_t rice_cost_bits(std::span<const Value> gaps, unsigned b) {
    std::uint64_t cost = 0;
    for (Value v : gaps) cost += ((v - 1) >> b) + 1 + b;
    return cost;
}

RiceParams rice_param_select(std::span<const Value> gaps) {
    if (gaps.empty()) fail(ErrorCode::InvalidGaps, "cannot select a Rice width for an empty sequence");
    check_gaps(gaps);
    const Value max_gap = *std::max_element(gaps.begin(), gaps.end());
    const unsigned hi = std::min(ceil_log2(max_gap), kMaxRiceWidth);
    unsigned best = 0;
    std::uint64_t best_cost = rice_cost_bits(gaps, 0);
    for (unsigned b = 1; b <= hi; ++b) {
        const std::uint64_t c = rice_cost_bits(gaps, b);
        if (c < best_cost) {
            best_cost = c;
            best = b;
        }
    }
    return {best};
}

std::vector<Value> riceruns_tokens(std::span<const Value> gaps) {
    std::vector<Value> tokens;
    tokens.reserve(gaps.size());
    for (std::size_t i = 0; i < gaps.size();) {
        if (gaps[i] != 1) {
            tokens.push_back(gaps[i++]);
            continue;
        }
        std::size_t j = i;
        while (j < gaps.size() && gaps[j] == 1) ++j;
        tokens.push_back(1);
        tokens.push_back(j - i);
        i = j;
    }
    return tokens;
}

CodecParams select_params(CodecId codec, std::span<const Value> gaps, const CodecParams& base) {
    CodecParams p = base;
    if (gaps.empty()) return p;
    if (codec == CodecId::Rice) p.rice = rice_param_select(gaps);
    if (codec == CodecId::RiceRuns) {
        const auto tokens = riceruns_tokens(gaps);
        p.rice = rice_param_select(tokens);
    }
    return p;
}

std::vector<std::uint8_t> encode(std::span<const Value> gaps, CodecId codec, const CodecParams& params) {
    check_gaps(gaps);
    std::vector<std::uint8_t> out;
    switch (codec) {
        case CodecId::Vbyte:
            for (Value g : gaps) vbyte::put(g, out);
            break;
        case CodecId::Rice: {
            check_rice(params);
            BitWriter w;
            for (Value g : gaps) rice_put(w, g, params.rice.b);
            out = w.take();
            break;
        }
        case CodecId::RiceRuns: {
            check_rice(params);
            BitWriter w;
            for (Value t : riceruns_tokens(gaps)) rice_put(w, t, params.rice.b);
            out = w.take();
            break;
        }
        case CodecId::Simple9:
            simple9::encode_words(gaps, out);
            break;
        case CodecId::PforDelta: {
            check_pfor(params);
            const std::size_t block = params.pfor.pfdThreshold;
            for (std::size_t i = 0; i < gaps.size(); i += block)
                pfor_encode_block(gaps.subspan(i, std::min(block, gaps.size() - i)), out);
            break;
        }
    }
    return out;
}

std::vector<Value> decode(std::span<const std::uint8_t> payload, CodecId codec, std::size_t n,
                          const CodecParams& params) {
    std::vector<Value> out;
    out.reserve(n);
    GapReader reader(payload, codec, n, params);
    while (!reader.done()) out.push_back(reader.next());
    return out;
}

std::vector<std::uint8_t> encode_stream(std::span<const Value> gaps, CodecId codec, const CodecParams& params) {
    if (gaps.size() > std::numeric_limits<std::uint32_t>::max()) fail(ErrorCode::ValueTooLarge, "list too long");
    std::uint16_t param = 0;
    if (codec == CodecId::Rice || codec == CodecId::RiceRuns) param = static_cast<std::uint16_t>(params.rice.b);
    if (codec == CodecId::PforDelta) param = static_cast<std::uint16_t>(params.pfor.pfdThreshold);
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(codec));
    out.push_back(0);
    const auto n = static_cast<std::uint32_t>(gaps.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    out.push_back(static_cast<std::uint8_t>(param));
    out.push_back(static_cast<std::uint8_t>(param >> 8));
    const auto payload = encode(gaps, codec, params);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

StreamHeader read_stream_header(std::span<const std::uint8_t> stream) {
    if (stream.size() < kStreamHeaderBytes) fail(ErrorCode::CorruptStream, "stream shorter than its header");
    if (stream[0] > static_cast<std::uint8_t>(CodecId::RiceRuns)) fail(ErrorCode::CorruptStream, "unknown codec id");
    StreamHeader h;
    h.codec = static_cast<CodecId>(stream[0]);
    h.n = std::uint32_t{stream[2]} | (std::uint32_t{stream[3]} << 8) | (std::uint32_t{stream[4]} << 16) |
          (std::uint32_t{stream[5]} << 24);
    h.param = static_cast<std::uint16_t>(stream[6] | (stream[7] << 8));
    return h;
}

CodecParams params_from_header(const StreamHeader& h) {
    CodecParams p;
    if (h.codec == CodecId::Rice || h.codec == CodecId::RiceRuns) p.rice.b = h.param;
    if (h.codec == CodecId::PforDelta) p.pfor.pfdThreshold = h.param;
    return p;
}

std::vector<Value> decode_stream(std::span<const std::uint8_t> stream) {
    const auto h = read_stream_header(stream);
    return decode(stream.subspan(kStreamHeaderBytes), h.codec, h.n, params_from_header(h));
}

// ---- GapReader ----------------------------------------------------------

GapReader::GapReader(std::span<const std::uint8_t> payload, CodecId codec, std::size_t n, const CodecParams& params)
    : payload_(payload), codec_(codec), params_(params), n_(n) {
    if (codec == CodecId::Rice || codec == CodecId::RiceRuns) {
        check_rice(params);
        bits_ = BitReader(payload);
    }
    if (codec == CodecId::PforDelta) check_pfor(params);
}

void GapReader::refill() {
    buf_.clear();
    buf_pos_ = 0;
    const std::size_t len = std::min<std::size_t>(n_ - consumed_, params_.pfor.pfdThreshold);
    pfor_decode_block(payload_, byte_pos_, len, buf_);
    decoded_ += buf_.size();
}

Value GapReader::next() {
    if (done()) fail(ErrorCode::CorruptStream, "read past the end of the list");
    switch (codec_) {
        case CodecId::Vbyte: {
            const Value g = vbyte::get(payload_, byte_pos_);
            if (g == 0) fail(ErrorCode::CorruptStream, "zero gap in vbyte stream");
            ++decoded_;
            ++consumed_;
            return g;
        }
        case CodecId::Rice: {
            const Value g = rice_get(bits_, params_.rice.b);
            ++decoded_;
            ++consumed_;
            return g;
        }
        case CodecId::RiceRuns: {
            if (pending_units_ == 0) {
                const Value t = rice_get(bits_, params_.rice.b);
                ++decoded_;
                if (t != 1) {
                    ++consumed_;
                    return t;
                }
                const Value k = rice_get(bits_, params_.rice.b);
                ++decoded_;
                if (k > n_ - consumed_) fail(ErrorCode::CorruptStream, "unit run exceeds list length");
                pending_units_ = k;
            }
            --pending_units_;
            ++consumed_;
            return 1;
        }
        case CodecId::Simple9:
        case CodecId::PforDelta: {
            if (buf_pos_ >= buf_.size()) {
                // Simple9 words can hold fewer than 28 values; decode word by word.
                if (codec_ == CodecId::Simple9) {
                    buf_.clear();
                    buf_pos_ = 0;
                    std::size_t pos = byte_pos_;
                    if (payload_.size() < 4 || pos > payload_.size() - 4)
                        fail(ErrorCode::CorruptStream, "truncated Simple9 stream");
                    const std::uint32_t sel = payload_[pos + 3] >> 4;
                    if (sel >= simple9::kCases.size()) fail(ErrorCode::CorruptStream, "invalid Simple9 selector");
                    const std::size_t take = std::min<std::size_t>(simple9::kCases[sel].count, n_ - consumed_);
                    simple9::decode_words(payload_, byte_pos_, take, buf_);
                    decoded_ += buf_.size();
                } else {
                    refill();
                }
            }
            ++consumed_;
            return buf_[buf_pos_++];
        }
    }
    fail(ErrorCode::CorruptStream, "unknown codec");
}

void GapReader::seek_vbyte(std::size_t byte_offset, std::size_t consumed) {
    if (codec_ != CodecId::Vbyte) fail(ErrorCode::InvalidArgument, "byte seeks require a Vbyte stream");
    if (byte_offset > payload_.size() || consumed > n_) fail(ErrorCode::CorruptStream, "seek beyond stream");
    byte_pos_ = byte_offset;
    consumed_ = consumed;
}

void GapReader::skip_units(Value k) {
    if (k > pending_units_) fail(ErrorCode::InvalidArgument, "skipping beyond the pending unit run");
    pending_units_ -= k;
    consumed_ += k;
}

}  // namespace hrdc
