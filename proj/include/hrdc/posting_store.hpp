#pragma once

// One interface over every posting-list family, selected by method name
// (Vbyte, Vbyte-CM, Rice-Runs, Vbyte-LZMA, Vbyte-Lzend, RePair-Skip-ST, ...).

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrdc/byte_io.hpp"
#include "hrdc/intersect.hpp"
#include "hrdc/lzend.hpp"
#include "hrdc/repair_postings.hpp"

namespace hrdc {

enum class Scenario : std::uint8_t { NonPositional = 0, Positional = 1 };

std::string_view to_string(Scenario s) noexcept;
Scenario scenario_from_string(std::string_view s);

struct MethodConfig {
    std::string name;
    unsigned k = 0;
    unsigned B = 0;
    unsigned len_bitmap_div = 0;  // 0: no bitmaps
    unsigned pfd_threshold = 100;
    unsigned ds = 0;
    unsigned minbcssize = 0;
    double repair_break = 0.0;

    // "k=32, lenBitmapDiv=8"; "x" when the method has no parameters.
    std::string parameterization() const;
    // Name plus parameters, without spaces: "Vbyte-CMB:k=32,lenBitmapDiv=8".
    std::string label() const;
};

// Defaults follow the scenario (RePair-Skip-ST uses B=1024 or 256, repairBreak
// 4e-7 or 5e-7). Unknown names or keys throw InvalidArgument.
MethodConfig method_config(std::string_view name, const std::map<std::string, std::string>& params = {},
                           Scenario scenario = Scenario::NonPositional);
const std::vector<std::string>& method_names();
// Every method at its default, plus the alternative parameterizations of the
// sampled and LZ-End methods.
std::vector<MethodConfig> configuration_grid(Scenario scenario);

class PostingStore {
public:
    virtual ~PostingStore() = default;
    virtual const MethodConfig& config() const = 0;
    virtual std::size_t list_count() const = 0;
    virtual Value universe() const = 0;
    virtual std::vector<Value> fetch(std::size_t term, IntersectStats* stats = nullptr) const = 0;
    // Values p with p + shifts[i] in list terms[i] for every i; at least two terms.
    virtual std::vector<Value> intersect(std::span<const std::size_t> terms, std::span<const Value> shifts,
                                         IntersectStats* stats = nullptr) const = 0;
    void serialize(ByteWriter& out) const;

protected:
    virtual void serialize_body(ByteWriter& out) const = 0;
};

std::unique_ptr<PostingStore> load_store(ByteReader& in);

// Builds stores for many methods over the same lists, sharing the Re-Pair
// grammars (per repairBreak) and the LZ-End parse.
class StoreBuilder {
public:
    StoreBuilder(std::span<const std::vector<Value>> lists, Value universe);
    ~StoreBuilder();
    std::unique_ptr<PostingStore> build(const MethodConfig& config);

private:
    std::span<const std::vector<Value>> lists_;
    Value universe_;
    std::vector<std::uint32_t> lengths_;
    std::map<double, RePairGrammar> grammars_;
    std::optional<LzEndParse> lzend_;
    std::vector<std::uint64_t> lzend_offsets_;
};

}  // namespace hrdc
