#include "hrdc/index.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <numeric>

#include "hrdc/error.hpp"

namespace hrdc {

namespace fs = std::filesystem;
using json = nlohmann::json;
using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;

namespace {

bool is_word_char(char c) {
    return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

std::span<const u8> as_bytes(std::string_view s) { return {reinterpret_cast<const u8*>(s.data()), s.size()}; }

std::string read_text(const fs::path& p) {
    const auto b = read_file(p.string());
    return std::string(b.begin(), b.end());
}

void write_text(const fs::path& p, std::string_view s) { write_file(p.string(), as_bytes(s)); }

json read_json(const fs::path& p) {
    try {
        return json::parse(read_text(p));
    } catch (const json::exception& e) {
        fail(ErrorCode::CorruptStream, p.string() + ": " + e.what());
    }
}

}  // namespace

// ---- corpus ------------------------------------------------------------------

std::string_view Corpus::doc(std::size_t d) const {
    if (d >= doc_starts.size()) fail(ErrorCode::OutOfRange, "document index out of range");
    const u64 end = d + 1 < doc_starts.size() ? doc_starts[d + 1] : text.size();
    return std::string_view(text).substr(doc_starts[d], end - doc_starts[d]);
}

Corpus load_corpus(const std::string& dir) {
    Corpus c;
    c.text = read_text(fs::path(dir) / "corpus.txt");
    const json m = read_json(fs::path(dir) / "manifest.json");
    try {
        c.doc_starts = m.at("doc_starts").get<std::vector<u64>>();
    } catch (const json::exception& e) {
        fail(ErrorCode::CorruptStream, std::string("corpus manifest: ") + e.what());
    }
    for (std::size_t d = 0; d < c.doc_starts.size(); ++d) {
        const bool ok = d == 0 ? c.doc_starts[0] == 0 : c.doc_starts[d] > c.doc_starts[d - 1];
        if (!ok || c.doc_starts[d] >= c.text.size())
            fail(ErrorCode::CorruptStream, "corpus manifest: document offsets must increase from 0");
    }
    return c;
}

void save_corpus(const Corpus& corpus, const std::string& dir, const std::string& extra_json) {
    fs::create_directories(dir);
    write_text(fs::path(dir) / "corpus.txt", corpus.text);
    json m = json::parse(extra_json);
    m["documents"] = corpus.doc_count();
    m["bytes"] = corpus.text.size();
    m["doc_starts"] = corpus.doc_starts;
    write_text(fs::path(dir) / "manifest.json", m.dump(1) + "\n");
}

// ---- tokens and vocabulary ---------------------------------------------------

std::vector<Token> tokenize(std::string_view text, std::uint64_t char_base, std::uint64_t word_base) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_word_char(text[j])) ++j;
        out.push_back({text.substr(i, j - i), char_base + i, word_base + out.size()});
        i = j;
    }
    return out;
}

Vocabulary::Vocabulary(std::vector<std::string> sorted_words) : words_(std::move(sorted_words)) {
    for (std::size_t i = 1; i < words_.size(); ++i)
        if (!(words_[i - 1] < words_[i])) fail(ErrorCode::InvalidArgument, "vocabulary must be sorted and unique");
    freq.assign(words_.size(), 0);
    doc_freq.assign(words_.size(), 0);
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view word) const {
    const auto it = std::lower_bound(words_.begin(), words_.end(), word);
    if (it == words_.end() || *it != word) return std::nullopt;
    return static_cast<u32>(it - words_.begin());
}

void Vocabulary::serialize(ByteWriter& out) const {
    out.u32(static_cast<u32>(words_.size()));
    for (std::size_t i = 0; i < words_.size(); ++i) {
        out.u32(static_cast<u32>(words_[i].size()));
        out.bytes(as_bytes(words_[i]));
        out.u64(freq[i]);
        out.u32(doc_freq[i]);
    }
}

Vocabulary Vocabulary::deserialize(ByteReader& in) {
    const u32 n = in.u32();
    if (n > in.remaining() / 16) fail(ErrorCode::CorruptStream, "vocabulary truncated");
    std::vector<std::string> words(n);
    std::vector<u64> f(n);
    std::vector<u32> df(n);
    for (u32 i = 0; i < n; ++i) {
        const auto w = in.bytes(in.u32());
        words[i].assign(w.begin(), w.end());
        f[i] = in.u64();
        df[i] = in.u32();
    }
    Vocabulary v;
    try {
        v = Vocabulary(std::move(words));
    } catch (const Error&) {
        fail(ErrorCode::CorruptStream, "vocabulary not sorted");
    }
    v.freq = std::move(f);
    v.doc_freq = std::move(df);
    return v;
}

// ---- inversion ---------------------------------------------------------------

Inverted invert(const Corpus& corpus, Scenario scenario) {
    if (corpus.doc_count() == 0 || corpus.text.empty()) fail(ErrorCode::EmptyCorpus, "corpus has no documents");
    Inverted inv;
    inv.scenario = scenario;
    inv.docs.total_chars = corpus.text.size();
    absl::flat_hash_map<std::string_view, u32> ids;
    std::vector<std::string_view> first_seen;
    std::vector<std::vector<Value>> lists;
    std::vector<u64> freq;
    std::vector<u32> df;
    u64 words = 0;
    for (std::size_t d = 0; d < corpus.doc_count(); ++d) {
        inv.docs.char_starts.push_back(corpus.doc_starts[d]);
        inv.docs.word_starts.push_back(words);
        const auto tokens = tokenize(corpus.doc(d), corpus.doc_starts[d], words);
        for (const auto& t : tokens) {
            const auto [it, fresh] = ids.try_emplace(t.word, static_cast<u32>(first_seen.size()));
            if (fresh) {
                first_seen.push_back(t.word);
                lists.emplace_back();
                freq.push_back(0);
                df.push_back(0);
            }
            const u32 id = it->second;
            ++freq[id];
            auto& l = lists[id];
            if (scenario == Scenario::Positional) {
                if (l.empty() || l.back() <= inv.docs.word_starts[d]) ++df[id];
                l.push_back(t.word_offset + 1);
            } else if (l.empty() || l.back() != d + 1) {
                ++df[id];
                l.push_back(d + 1);
            }
        }
        words += tokens.size();
    }
    inv.docs.total_words = words;
    std::vector<u32> order(first_seen.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](u32 a, u32 b) { return first_seen[a] < first_seen[b]; });
    std::vector<std::string> sorted;
    sorted.reserve(order.size());
    for (u32 o : order) sorted.emplace_back(first_seen[o]);
    inv.vocab = Vocabulary(std::move(sorted));
    inv.lists.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        inv.lists[i] = std::move(lists[order[i]]);
        inv.vocab.freq[i] = freq[order[i]];
        inv.vocab.doc_freq[i] = df[order[i]];
    }
    inv.universe = scenario == Scenario::Positional ? std::max<u64>(words, 1) : corpus.doc_count();
    return inv;
}

// ---- index -------------------------------------------------------------------

Index Index::assemble(const Inverted& inv, std::unique_ptr<PostingStore> postings,
                      std::shared_ptr<const TextStore> text, std::uint64_t raw_bytes) {
    require(postings != nullptr, ErrorCode::InvalidArgument, "postings required");
    require(postings->list_count() == inv.vocab.size(), ErrorCode::InvalidArgument, "one list per term");
    require(inv.scenario == Scenario::NonPositional || text != nullptr, ErrorCode::InvalidArgument,
            "positional index needs a text store");
    Index ix;
    ix.scenario_ = inv.scenario;
    ix.vocab_ = inv.vocab;
    ix.postings_ = std::move(postings);
    ix.docs_ = inv.docs;
    ix.raw_bytes_ = raw_bytes;
    if (inv.scenario == Scenario::Positional) {
        auto t = std::make_shared<TextStore>(*text);
        t->docs = inv.docs;
        ix.text_ = std::move(t);
    }
    return ix;
}

Index Index::build(const Corpus& corpus, Scenario scenario, const MethodConfig& method, std::uint32_t sample_ct) {
    const Inverted inv = invert(corpus, scenario);
    StoreBuilder builder(inv.lists, inv.universe);
    std::shared_ptr<const TextStore> text;
    if (scenario == Scenario::Positional)
        text = std::make_shared<TextStore>(TextStore::compress(as_bytes(corpus.text), sample_ct));
    return assemble(inv, builder.build(method), std::move(text), corpus.text.size());
}

std::optional<std::vector<std::uint32_t>> Index::parse_query(std::string_view pattern) const {
    std::vector<u32> ids;
    for (const auto& t : tokenize(pattern)) {
        const auto id = vocab_.id(t.word);
        if (!id) return std::nullopt;
        ids.push_back(*id);
    }
    if (ids.empty()) return std::nullopt;
    return ids;
}

std::vector<Value> Index::locate_and(std::span<const std::uint32_t> terms, IntersectStats* stats) const {
    if (scenario_ != Scenario::NonPositional) fail(ErrorCode::InvalidArgument, "AND queries need a non-positional index");
    std::vector<std::size_t> t(terms.begin(), terms.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.empty()) return {};
    if (t.size() == 1) return postings_->fetch(t[0], stats);
    const std::vector<Value> shifts(t.size(), 0);
    return postings_->intersect(t, shifts, stats);
}

std::vector<Value> Index::phrase_positions(std::span<const std::uint32_t> terms, IntersectStats* stats) const {
    if (scenario_ != Scenario::Positional) fail(ErrorCode::InvalidArgument, "phrase queries need a positional index");
    if (terms.empty()) return {};
    std::vector<Value> pos;
    if (terms.size() == 1) {
        pos = postings_->fetch(terms[0], stats);
    } else {
        std::vector<std::size_t> t(terms.begin(), terms.end());
        std::vector<Value> shifts(t.size());
        std::iota(shifts.begin(), shifts.end(), Value{0});
        pos = postings_->intersect(t, shifts, stats);
    }
    const u64 k = terms.size();
    const auto& starts = docs_.word_starts;
    std::size_t d = 0;
    std::vector<Value> out;
    out.reserve(pos.size());
    for (Value p : pos) {
        const u64 first = p - 1, last = first + k - 1;
        if (last >= docs_.total_words) continue;
        while (d + 1 < starts.size() && starts[d + 1] <= first) ++d;
        const u64 doc_end = d + 1 < starts.size() ? starts[d + 1] : docs_.total_words;
        if (last < doc_end) out.push_back(p);
    }
    return out;
}

std::vector<DocOffset> Index::locate_phrase(std::span<const std::uint32_t> terms, IntersectStats* stats) const {
    auto pos = phrase_positions(terms, stats);
    for (auto& p : pos) p -= 1;
    return merge_occs_to_docs(pos, docs_, PosUnit::Word);
}

std::vector<std::uint8_t> Index::extract(std::uint64_t a, std::uint64_t b) const {
    if (!text_) fail(ErrorCode::InvalidArgument, "index stores no text");
    return text_->extract(a, b);
}

std::map<std::string, std::uint64_t> Index::save(const std::string& dir) const {
    fs::create_directories(dir);
    std::map<std::string, u64> sizes;
    auto put = [&](const std::string& name, const ByteWriter& w) {
        write_file((fs::path(dir) / name).string(), w.data());
        sizes[name] = w.size();
    };
    {
        ByteWriter w;
        vocab_.serialize(w);
        put("vocab.bin", w);
    }
    {
        ByteWriter w;
        postings_->serialize(w);
        put("postings.bin", w);
    }
    if (text_) {
        ByteWriter w;
        text_->serialize(w);
        put("text.bin", w);
    } else {
        ByteWriter w;
        hrdc::serialize(docs_, w);
        put("docs.bin", w);
    }
    const auto& c = postings_->config();
    json m;
    m["format"] = "hrdc-index-1";
    m["scenario"] = std::string(to_string(scenario_));
    m["method"] = c.name;
    m["parameterization"] = c.parameterization();
    m["label"] = c.label();
    m["terms"] = vocab_.size();
    m["documents"] = docs_.size();
    m["words"] = docs_.total_words;
    m["universe"] = postings_->universe();
    m["raw_bytes"] = raw_bytes_;
    if (text_) m["sample_ct"] = text_->sample_ct();
    m["files"] = sizes;
    write_text(fs::path(dir) / "manifest.json", m.dump(1) + "\n");
    return sizes;
}

Index Index::load(const std::string& dir) {
    const json m = read_json(fs::path(dir) / "manifest.json");
    Index ix;
    try {
        if (m.at("format") != "hrdc-index-1") fail(ErrorCode::CorruptStream, "unknown index format");
        ix.scenario_ = scenario_from_string(m.at("scenario").get<std::string>());
        ix.raw_bytes_ = m.at("raw_bytes").get<u64>();
    } catch (const json::exception& e) {
        fail(ErrorCode::CorruptStream, std::string("index manifest: ") + e.what());
    }
    auto segment = [&](const char* name, auto&& parse) {
        const auto bytes = read_file((fs::path(dir) / name).string());
        ByteReader r(bytes);
        parse(r);
        if (!r.done()) fail(ErrorCode::CorruptStream, std::string(name) + " has trailing bytes");
    };
    segment("vocab.bin", [&](ByteReader& r) { ix.vocab_ = Vocabulary::deserialize(r); });
    segment("postings.bin", [&](ByteReader& r) { ix.postings_ = load_store(r); });
    if (ix.scenario_ == Scenario::Positional) {
        segment("text.bin", [&](ByteReader& r) {
            auto t = std::make_shared<TextStore>(TextStore::deserialize(r));
            ix.docs_ = t->docs;
            ix.text_ = std::move(t);
        });
    } else {
        segment("docs.bin", [&](ByteReader& r) { ix.docs_ = deserialize_docmap(r); });
    }
    if (ix.postings_->list_count() != ix.vocab_.size())
        fail(ErrorCode::CorruptStream, "postings and vocabulary disagree");
    return ix;
}

}  // namespace hrdc
