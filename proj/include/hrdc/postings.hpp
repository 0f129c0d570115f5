#pragma once

// Single posting lists over the gap codecs: encoded or bitmap storage,
// optional list (CM) or domain (ST) sample directories, cursors, and the
// merge / set-vs-set / lookup intersections.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hrdc/byte_io.hpp"
#include "hrdc/gap_codecs.hpp"
#include "hrdc/intersect.hpp"

namespace hrdc {

enum class ReprKind : std::uint8_t { Encoded = 0, Bitmap = 1 };
enum class SamplingKind : std::uint8_t { None = 0, CM = 1, ST = 2 };

struct HybridConfig {
    unsigned lenBitmapDiv = 8;
};

struct Sampling {
    SamplingKind kind = SamplingKind::None;
    unsigned param = 0;  // k for CM, B for ST

    static Sampling none() { return {}; }
    static Sampling cm(unsigned k) { return {SamplingKind::CM, k}; }
    static Sampling st(unsigned B) { return {SamplingKind::ST, B}; }
};

// Sample at element `index`: its absolute value and the byte offset just
// past its codeword, so decoding resumes with element index + 1.
struct CMSample {
    std::uint32_t index;
    Value value;
    std::uint32_t offset;
};

struct CMSamples {
    unsigned k = 0;
    std::size_t period = 1;
    std::vector<CMSample> entries;
};

// Bucket j: the first element >= j * s is element `index` (length() when
// none); its codeword starts at `offset` and `prev` is the value before it.
struct STBucket {
    std::uint32_t index;
    std::uint32_t offset;
    Value prev;
};

struct STSamples {
    unsigned B = 0;
    unsigned shift = 0;  // bucket width s = 2^shift
    std::vector<STBucket> buckets;

    Value width() const noexcept { return Value{1} << shift; }
};

struct ListRepr {
    ReprKind kind = ReprKind::Encoded;
    std::size_t length = 0;
    Value universe = 0;
    CodecId codec = CodecId::Vbyte;
    CodecParams params;
    std::vector<std::uint8_t> payload;  // encoded gaps, no header
    std::vector<std::uint64_t> bitmap;  // bit v set iff v is in the list
    std::optional<CMSamples> cm;
    std::optional<STSamples> st;

    SamplingKind sampling() const noexcept {
        return cm ? SamplingKind::CM : (st ? SamplingKind::ST : SamplingKind::None);
    }
};

// p = max(1, k * ceil(log2 len))
std::size_t cm_period(unsigned k, std::size_t length);
// smallest e with 2^e >= universe * B / length
unsigned st_shift(Value universe, unsigned B, std::size_t length);
bool uses_bitmap(std::size_t length, Value universe, const HybridConfig& hybrid);

ListRepr build_list(std::span<const Value> values, Value universe, CodecId codec, Sampling sampling = {},
                    std::optional<HybridConfig> hybrid = std::nullopt, const CodecParams& base = {});

class ListCursor {
public:
    // With use_samples = false the cursor never touches sample directories.
    explicit ListCursor(const ListRepr& repr, bool use_samples = true);

    std::optional<Value> next();
    std::optional<Value> seek(Value x);
    bool probe(Value x);

    std::uint64_t decoded() const noexcept;
    std::size_t length() const noexcept { return repr_->length; }

private:
    std::optional<Value> seek_linear(Value x);
    std::optional<Value> seek_cm(Value x);
    std::optional<Value> seek_st(Value x);
    std::optional<Value> bitmap_from(Value x);
    void resume(std::size_t consumed, Value current, std::size_t offset);

    const ListRepr* repr_;
    bool use_samples_;
    GapReader reader_;
    Value current_ = 0;
    bool started_ = false;
    std::uint64_t extra_decoded_ = 0;
};

std::vector<Value> fetch(const ListRepr& repr, IntersectStats* stats = nullptr);
std::optional<Value> next_geq(ListCursor& cursor, Value x);

std::vector<Value> intersect_merge(std::span<const ListRepr* const> lists, IntersectStats* stats = nullptr);
std::vector<Value> intersect_svs(std::span<const ListRepr* const> lists, IntersectStats* stats = nullptr);
std::vector<Value> intersect_lookup(std::span<const ListRepr* const> lists, IntersectStats* stats = nullptr);

// Shifted variants used for phrase queries.
std::vector<Value> intersect_merge_shifted(std::span<const ListRepr* const> lists, std::span<const Value> shifts,
                                           IntersectStats* stats = nullptr);
std::vector<Value> intersect_svs_shifted(std::span<const ListRepr* const> lists, std::span<const Value> shifts,
                                         IntersectStats* stats = nullptr);
std::vector<Value> intersect_lookup_shifted(std::span<const ListRepr* const> lists, std::span<const Value> shifts,
                                            IntersectStats* stats = nullptr);

void serialize(const ListRepr& repr, ByteWriter& out);
ListRepr deserialize_list(ByteReader& in);

}  // namespace hrdc
