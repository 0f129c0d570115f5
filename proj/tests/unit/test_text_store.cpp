#include <gtest/gtest.h>

#include <algorithm>

#include "hrdc/error.hpp"
#include "hrdc/text_store.hpp"
#include "support/oracles.hpp"

using namespace hrdc;
using Bytes = std::vector<std::uint8_t>;

namespace {

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

Bytes slice(const Bytes& t, std::uint64_t a, std::uint64_t b) {
    return Bytes(t.begin() + static_cast<std::ptrdiff_t>(a), t.begin() + static_cast<std::ptrdiff_t>(b));
}

}  // namespace

TEST(TextStore, Examples) {
    auto t = TextStore::compress(to_bytes("abab"), 1);
    ASSERT_EQ(t.rule_count(), 1u);
    EXPECT_EQ(t.sequence_length(), 2u);
    EXPECT_EQ(t.sequence()[0], TextStore::kFirstRule);
    EXPECT_EQ(t.sequence()[1], TextStore::kFirstRule);
    EXPECT_EQ(std::vector<std::uint64_t>(t.samples().begin(), t.samples().end()),
              (std::vector<std::uint64_t>{0, 2}));
    EXPECT_EQ(t.extract(0, 4), to_bytes("abab"));
    EXPECT_EQ(t.extract(1, 3), to_bytes("ba"));
    EXPECT_TRUE(t.extract(2, 2).empty());
    EXPECT_THROW(t.extract(3, 5), Error);
    EXPECT_THROW(t.extract(3, 2), Error);

    oracle::Rng rng(31);
    const auto kb = to_bytes(oracle::random_bytes(rng, 1024, 26));
    t = TextStore::compress(kb, 4096);
    ASSERT_EQ(t.samples().size(), 1u);
    EXPECT_EQ(t.samples()[0], 0u);
    EXPECT_EQ(t.extract(0, kb.size()), kb);

    EXPECT_THROW(TextStore::compress(Bytes{}, 1), Error);
    EXPECT_THROW(TextStore::compress(kb, 0), Error);
}

TEST(TextStore, ZeroBytesAreOrdinary) {
    const Bytes t{0, 0, 0, 0, 1, 0, 0};
    const auto s = TextStore::compress(t, 2);
    EXPECT_EQ(s.extract(0, t.size()), t);
}

TEST(TextStore, ExtractWindowsAcrossSamplings) {
    oracle::Rng rng(32);
    const auto text = to_bytes(oracle::repetitive_bytes(rng, 3000, 60, 20, 0.01));
    const auto base = TextStore::compress(text, 1);
    std::uint64_t prev_work = 0;
    std::size_t prev_size = 0;
    for (std::uint32_t ct : {1u, 2u, 8u, 32u, 64u, 256u, 4096u}) {
        const auto s = base.resampled(ct);
        ByteWriter w;
        s.serialize(w);
        if (prev_size) EXPECT_LT(w.size(), prev_size);
        prev_size = w.size();
        ByteReader r(w.data());
        const auto back = TextStore::deserialize(r);
        EXPECT_TRUE(r.done());
        EXPECT_EQ(back.extract(0, text.size()), text);
        oracle::Rng qrng(7);
        ExtractStats stats;
        for (int q = 0; q < 2000; ++q) {
            const std::uint64_t width = q % 2 ? 80 : 1300;
            const std::uint64_t a = oracle::uniform(qrng, 0, text.size() - width);
            ASSERT_EQ(back.extract(a, a + width, &stats), slice(text, a, a + width));
        }
        EXPECT_GE(stats.expanded, prev_work);
        prev_work = stats.expanded;
    }
}

TEST(TextStore, RandomTexts) {
    oracle::Rng rng(33);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = oracle::uniform(rng, 1, 3000);
        const auto text = to_bytes(t % 2 ? oracle::random_bytes(rng, n, static_cast<unsigned>(oracle::uniform(rng, 1, 5)))
                                         : oracle::repetitive_bytes(rng, n / 10 + 1, 10, 4, 0.02));
        const auto s = TextStore::compress(text, static_cast<std::uint32_t>(oracle::uniform(rng, 1, 50)));
        for (int q = 0; q < 50; ++q) {
            const std::uint64_t a = oracle::uniform(rng, 0, text.size());
            const std::uint64_t b = oracle::uniform(rng, a, text.size());
            ASSERT_EQ(s.extract(a, b), slice(text, a, b));
        }
    }
}

TEST(TextStore, CorruptInputRejected) {
    const auto s = TextStore::compress(to_bytes("abcabcabcabc"), 2);
    ByteWriter w;
    s.serialize(w);
    auto bytes = w.data();
    bytes[8] = 0;  // sample_ct
    ByteReader r1(bytes);
    EXPECT_THROW(TextStore::deserialize(r1), Error);
    bytes = w.data();
    bytes.resize(bytes.size() - 3);
    ByteReader r2(bytes);
    EXPECT_THROW(TextStore::deserialize(r2), Error);
}

TEST(MergeOccs, Examples) {
    DocMap m;
    m.char_starts = {0, 100, 250};
    m.word_starts = {0, 20, 50};
    m.total_chars = 300;
    m.total_words = 60;
    const std::vector<std::uint64_t> pos{10, 105, 260};
    EXPECT_EQ(merge_occs_to_docs(pos, m, PosUnit::Char),
              (std::vector<DocOffset>{{0, 10}, {1, 5}, {2, 10}}));
    const std::vector<std::uint64_t> starts{0, 100, 250};
    EXPECT_EQ(merge_occs_to_docs(starts, m, PosUnit::Char), (std::vector<DocOffset>{{0, 0}, {1, 0}, {2, 0}}));
    const std::vector<std::uint64_t> words{19, 20, 59};
    EXPECT_EQ(merge_occs_to_docs(words, m, PosUnit::Word), (std::vector<DocOffset>{{0, 19}, {1, 0}, {2, 9}}));
    const std::vector<std::uint64_t> beyond{300};
    EXPECT_THROW(merge_occs_to_docs(beyond, m, PosUnit::Char), Error);
}

TEST(MergeOccs, MatchesBinarySearch) {
    oracle::Rng rng(34);
    DocMap m;
    std::uint64_t c = 0;
    for (int d = 0; d < 500; ++d) {
        m.char_starts.push_back(c);
        m.word_starts.push_back(c / 5);
        c += oracle::uniform(rng, 1, 400);
    }
    m.total_chars = c;
    m.total_words = c / 5 + 1;
    std::vector<std::uint64_t> pos;
    for (int i = 0; i < 10000; ++i) pos.push_back(oracle::uniform(rng, 0, c - 1));
    std::sort(pos.begin(), pos.end());
    const auto got = merge_occs_to_docs(pos, m, PosUnit::Char);
    ASSERT_EQ(got.size(), pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const auto it = std::upper_bound(m.char_starts.begin(), m.char_starts.end(), pos[i]);
        const auto d = static_cast<std::uint64_t>(it - m.char_starts.begin()) - 1;
        ASSERT_EQ(got[i], (DocOffset{d, pos[i] - m.char_starts[d]}));
        ASSERT_EQ(m.char_starts[got[i].doc] + got[i].offset, pos[i]);
    }
}
