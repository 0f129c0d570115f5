#pragma once

// Re-Pair substitution engine shared by the posting-list grammar and the
// text store. Symbols are 32-bit; rules get consecutive ids starting at
// `first_rule`.

#include <cstdint>
#include <vector>

namespace hrdc {

struct RePairOptions {
    std::uint32_t first_rule = 0;
    double repair_break = 0.0;
    // When set, symbol 0 is a separator that never takes part in a pair.
    bool zero_separator = false;
};

struct RePairResult {
    std::vector<std::uint32_t> lefts;
    std::vector<std::uint32_t> rights;
    std::vector<std::uint32_t> sequence;
    std::uint64_t original_length = 0;
};

// Exact Re-Pair: repeatedly replaces the most frequent pair (non-overlapping
// occurrence count >= 2, ties to the smallest (left, right)) by a new rule.
RePairResult repair_compress(std::vector<std::uint32_t> symbols, const RePairOptions& options);

// Number of non-overlapping occurrences of the most frequent admissible pair.
std::size_t max_pair_frequency(const std::vector<std::uint32_t>& sequence, bool zero_separator);

}  // namespace hrdc
