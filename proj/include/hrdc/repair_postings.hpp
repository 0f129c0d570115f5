#pragma once

// Posting lists stored as one Re-Pair grammar over the concatenated gaps.
// Each list is preceded by the separator 0, which never takes part in a rule.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hrdc/byte_io.hpp"
#include "hrdc/gap_codecs.hpp"
#include "hrdc/intersect.hpp"

namespace hrdc {

using Symbol = std::uint32_t;

struct RePairConfig {
    double repairBreak = 0.0;
};

struct RePairGrammar {
    Symbol first_rule = 1;  // every symbol >= first_rule is a rule
    std::uint64_t original_length = 0;
    std::vector<Symbol> lefts;
    std::vector<Symbol> rights;
    std::vector<Value> sums;            // total of the gaps below each rule
    std::vector<std::uint32_t> counts;  // number of gaps below each rule
    std::vector<Symbol> sequence;
    std::vector<std::uint64_t> list_offsets;  // first symbol after each separator

    bool is_rule(Symbol s) const noexcept { return s >= first_rule; }
    std::size_t rule_count() const noexcept { return lefts.size(); }
    std::size_t list_count() const noexcept { return list_offsets.size(); }
    // One past the last symbol of list i.
    std::uint64_t list_end(std::size_t i) const noexcept {
        return i + 1 < list_offsets.size() ? list_offsets[i + 1] - 1 : sequence.size();
    }
    Value sum_of(Symbol s) const noexcept { return is_rule(s) ? sums[s - first_rule] : s; }
    std::uint32_t count_of(Symbol s) const noexcept { return is_rule(s) ? counts[s - first_rule] : 1; }
};

RePairGrammar repair_build(std::span<const std::vector<Value>> gap_lists, const RePairConfig& config);

std::vector<Value> expand(const RePairGrammar& g, Symbol s);

// Recomputes sums/counts from the rules.
void compute_skips(RePairGrammar& g);

enum class RePairVariant : std::uint8_t { Plain = 0, Skip = 1, SkipCM = 2, SkipST = 3 };

std::string_view to_string(RePairVariant v) noexcept;

// A resume point at a top-level symbol: `index` gaps precede it, it sits at
// sequence position `pos`, and `prev` is the value before its first gap.
struct RpSample {
    std::uint32_t index;
    std::uint32_t pos;
    Value prev;
};

struct RePairPostings {
    RePairGrammar grammar;
    RePairVariant variant = RePairVariant::Plain;
    unsigned param = 0;  // k for SkipCM, B for SkipST
    Value universe = 0;
    std::vector<std::uint32_t> lengths;
    std::vector<std::uint32_t> sample_starts;  // per list, into `samples`
    std::vector<RpSample> samples;

    std::size_t list_count() const noexcept { return lengths.size(); }
};

RePairPostings rp_build(std::span<const std::vector<Value>> lists, Value universe, RePairVariant variant,
                        unsigned param = 0, const RePairConfig& config = {});

// Attaches a variant's sample directory to an already built grammar.
RePairPostings rp_with_variant(RePairGrammar grammar, std::span<const std::uint32_t> lengths, Value universe,
                               RePairVariant variant, unsigned param);

class RePairCursor {
public:
    RePairCursor(const RePairPostings& rp, std::size_t list, bool use_skips, bool use_samples);

    std::optional<Value> next();
    std::optional<Value> seek(Value x);
    bool probe(Value x);
    std::uint64_t decoded() const noexcept { return decoded_; }
    std::uint64_t expanded() const noexcept { return expanded_; }

private:
    void jump(Value x);

    const RePairPostings* rp_;
    const RePairGrammar* g_;
    std::uint64_t pos_;
    std::uint64_t end_;
    std::vector<Symbol> stack_;
    Value running_ = 0;
    std::uint64_t index_ = 0;
    bool started_ = false;
    bool skips_;
    bool samples_;
    std::span<const RpSample> dir_;
    unsigned shift_ = 0;
    std::uint64_t decoded_ = 0;
    std::uint64_t expanded_ = 0;
};

std::vector<Value> rp_fetch(const RePairPostings& rp, std::size_t list, IntersectStats* stats = nullptr);

// Plain and Skip use a merge; SkipCM and SkipST decode the shortest list and
// probe the others through their samples.
std::vector<Value> rp_intersect(const RePairPostings& rp, std::span<const std::size_t> lists,
                                IntersectStats* stats = nullptr);
std::vector<Value> rp_intersect_shifted(const RePairPostings& rp, std::span<const std::size_t> lists,
                                        std::span<const Value> shifts, IntersectStats* stats = nullptr);

void serialize(const RePairPostings& rp, ByteWriter& out);
RePairPostings deserialize_repair(ByteReader& in);

}  // namespace hrdc
