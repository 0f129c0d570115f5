#pragma once

// Re-Pair compressed byte text with a sample every sample_ct sequence symbols,
// plus the document boundary map used to turn absolute positions into
// (document, offset) pairs.

#include <cstdint>
#include <span>
#include <vector>

#include "hrdc/byte_io.hpp"

namespace hrdc {

struct DocMap {
    std::vector<std::uint64_t> char_starts;
    std::vector<std::uint64_t> word_starts;
    std::uint64_t total_chars = 0;
    std::uint64_t total_words = 0;

    std::size_t size() const noexcept { return char_starts.size(); }
    void validate() const;
};

void serialize(const DocMap& map, ByteWriter& out);
DocMap deserialize_docmap(ByteReader& in);

enum class PosUnit { Char, Word };

struct DocOffset {
    std::uint64_t doc;  // 0-based document index
    std::uint64_t offset;
    bool operator==(const DocOffset&) const = default;
};

// Positions are 0-based and ascending; one merge pass over the boundaries.
std::vector<DocOffset> merge_occs_to_docs(std::span<const std::uint64_t> positions, const DocMap& map, PosUnit unit);

struct ExtractStats {
    std::uint64_t expanded = 0;  // symbols expanded before reaching the range start
};

class TextStore {
public:
    static constexpr std::uint32_t kFirstRule = 256;

    TextStore() = default;
    static TextStore compress(std::span<const std::uint8_t> text, std::uint32_t sample_ct);
    // Same grammar, new sample directory.
    TextStore resampled(std::uint32_t sample_ct) const;

    std::vector<std::uint8_t> extract(std::uint64_t a, std::uint64_t b, ExtractStats* stats = nullptr) const;

    std::uint64_t length() const noexcept { return length_; }
    std::uint32_t sample_ct() const noexcept { return sample_ct_; }
    std::size_t rule_count() const noexcept { return lefts_.size(); }
    std::size_t sequence_length() const noexcept { return sequence_.size(); }
    std::span<const std::uint64_t> samples() const noexcept { return samples_; }
    std::span<const std::uint32_t> sequence() const noexcept { return sequence_; }
    std::span<const std::uint32_t> lefts() const noexcept { return lefts_; }
    std::span<const std::uint32_t> rights() const noexcept { return rights_; }

    DocMap docs;

    void serialize(ByteWriter& out) const;
    static TextStore deserialize(ByteReader& in);

private:
    void build_samples();

    std::uint64_t length_ = 0;
    std::uint32_t sample_ct_ = 1;
    std::vector<std::uint32_t> lefts_;
    std::vector<std::uint32_t> rights_;
    std::vector<std::uint32_t> sequence_;
    std::vector<std::uint64_t> samples_;  // text position of sequence symbol k * sample_ct
};

}  // namespace hrdc
