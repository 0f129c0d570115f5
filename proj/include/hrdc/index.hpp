#pragma once

// Non-positional and positional inverted indexes over a corpus of
// concatenated documents. Document ids and word positions are 1-based.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrdc/posting_store.hpp"
#include "hrdc/text_store.hpp"

namespace hrdc {

// A corpus directory holds corpus.txt and manifest.json with the char
// offset of every document.
struct Corpus {
    std::string text;
    std::vector<std::uint64_t> doc_starts;

    std::size_t doc_count() const noexcept { return doc_starts.size(); }
    std::string_view doc(std::size_t d) const;
};

Corpus load_corpus(const std::string& dir);
void save_corpus(const Corpus& corpus, const std::string& dir, const std::string& extra_json = "{}");

struct Token {
    std::string_view word;
    std::uint64_t char_offset;
    std::uint64_t word_offset;
};

// Maximal runs of ASCII letters and digits, case preserved.
std::vector<Token> tokenize(std::string_view text, std::uint64_t char_base = 0, std::uint64_t word_base = 0);

class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> sorted_words);

    std::size_t size() const noexcept { return words_.size(); }
    std::optional<std::uint32_t> id(std::string_view word) const;
    const std::string& word(std::uint32_t id) const { return words_.at(id); }

    std::vector<std::uint64_t> freq;  // occurrences
    std::vector<std::uint32_t> doc_freq;

    void serialize(ByteWriter& out) const;
    static Vocabulary deserialize(ByteReader& in);

private:
    std::vector<std::string> words_;
};

// Everything built from the corpus before a posting representation is chosen.
struct Inverted {
    Scenario scenario = Scenario::NonPositional;
    Vocabulary vocab;
    std::vector<std::vector<Value>> lists;
    Value universe = 0;
    DocMap docs;
};

Inverted invert(const Corpus& corpus, Scenario scenario);

class Index {
public:
    // text may be null for the non-positional scenario.
    static Index assemble(const Inverted& inv, std::unique_ptr<PostingStore> postings,
                          std::shared_ptr<const TextStore> text, std::uint64_t raw_bytes);
    static Index build(const Corpus& corpus, Scenario scenario, const MethodConfig& method,
                       std::uint32_t sample_ct = 64);

    Scenario scenario() const noexcept { return scenario_; }
    const Vocabulary& vocab() const noexcept { return vocab_; }
    const PostingStore& postings() const noexcept { return *postings_; }
    const TextStore* text() const noexcept { return text_.get(); }
    const DocMap& docs() const noexcept { return docs_; }
    std::uint64_t raw_bytes() const noexcept { return raw_bytes_; }

    // nullopt when a word is out of vocabulary or the pattern has no words.
    std::optional<std::vector<std::uint32_t>> parse_query(std::string_view pattern) const;

    // Documents containing every term.
    std::vector<Value> locate_and(std::span<const std::uint32_t> terms, IntersectStats* stats = nullptr) const;
    // Word positions (1-based) where the phrase starts, not crossing documents.
    std::vector<Value> phrase_positions(std::span<const std::uint32_t> terms, IntersectStats* stats = nullptr) const;
    // (0-based document, word offset in document) of each phrase occurrence.
    std::vector<DocOffset> locate_phrase(std::span<const std::uint32_t> terms, IntersectStats* stats = nullptr) const;
    std::vector<std::uint8_t> extract(std::uint64_t a, std::uint64_t b) const;

    // Writes manifest.json, vocab.bin, postings.bin and (positional) text.bin;
    // returns the byte size of each file.
    std::map<std::string, std::uint64_t> save(const std::string& dir) const;
    static Index load(const std::string& dir);

private:
    Scenario scenario_ = Scenario::NonPositional;
    Vocabulary vocab_;
    std::unique_ptr<PostingStore> postings_;
    std::shared_ptr<const TextStore> text_;
    DocMap docs_;
    std::uint64_t raw_bytes_ = 0;
};

}  // namespace hrdc
