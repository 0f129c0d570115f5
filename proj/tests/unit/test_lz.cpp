#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "hrdc/error.hpp"
#include "hrdc/lz_postings.hpp"
#include "hrdc/lzend.hpp"
#include "hrdc/suffix_array.hpp"
#include "support/oracles.hpp"

using namespace hrdc;
using Values = std::vector<Value>;
using Bytes = std::vector<std::uint8_t>;

namespace {

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

void check_valid(const LzEndParse& p, const Bytes& input) {
    ASSERT_EQ(p.length, input.size());
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        ASSERT_EQ(p.start_of(i), pos);
        if (p.copies[i] > 0) {
            ASSERT_LT(p.sources[i], i);
            // the copied text ends exactly at the source phrase's end
            const std::uint64_t e = p.ends[p.sources[i]];
            ASSERT_GE(e + 1, p.copies[i]);
            ASSERT_TRUE(std::equal(input.begin() + static_cast<std::ptrdiff_t>(e + 1 - p.copies[i]),
                                   input.begin() + static_cast<std::ptrdiff_t>(e + 1),
                                   input.begin() + static_cast<std::ptrdiff_t>(pos)));
        }
        const bool lit = i + 1 < p.size() || p.last_has_trailing;
        pos += p.copies[i] + (lit ? 1 : 0);
        ASSERT_EQ(p.ends[i] + 1, pos);
        if (lit) ASSERT_EQ(p.trailing[i], input[pos - 1]);
    }
    ASSERT_EQ(pos, input.size());
    ASSERT_EQ(lzend_expand(p), input);
}

Bytes random_input(oracle::Rng& rng, std::size_t max_len) {
    const std::size_t n = oracle::uniform(rng, 1, max_len);
    std::string s;
    if (oracle::uniform(rng, 0, 1)) {
        s = oracle::random_bytes(rng, n, static_cast<unsigned>(oracle::uniform(rng, 1, 26)));
    } else {
        const std::size_t block = oracle::uniform(rng, 1, std::max<std::size_t>(1, n / 4));
        s = oracle::repetitive_bytes(rng, block, n / block + 1, static_cast<unsigned>(oracle::uniform(rng, 2, 8)),
                                     0.01);
        s.resize(n);
    }
    return to_bytes(s);
}

}  // namespace

TEST(SuffixArray, MatchesNaiveSort) {
    oracle::Rng rng(21);
    for (int t = 0; t < 300; ++t) {
        const auto b = random_input(rng, 400);
        std::vector<std::int32_t> s(b.begin(), b.end());
        for (auto& x : s) x += 1;
        s.push_back(0);
        const auto sa = suffix_array(s, 257);
        std::vector<std::int32_t> ref(s.size());
        std::iota(ref.begin(), ref.end(), 0);
        std::sort(ref.begin(), ref.end(), [&](std::int32_t a, std::int32_t c) {
            return std::lexicographical_compare(s.begin() + a, s.end(), s.begin() + c, s.end());
        });
        ASSERT_EQ(sa, ref);
    }
}

TEST(LzEnd, Examples) {
    auto p = lzend_parse(to_bytes("aaaa"));
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p.copies, (std::vector<std::uint32_t>{0, 1, 1}));
    EXPECT_EQ(p.ends, (std::vector<std::uint64_t>{0, 2, 3}));
    EXPECT_EQ(p.trailing[0], 'a');
    EXPECT_EQ(p.trailing[1], 'a');
    EXPECT_EQ(p.sources[1], 0u);
    EXPECT_FALSE(p.last_has_trailing);

    p = lzend_parse(to_bytes("x"));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.copies[0], 0u);
    EXPECT_EQ(p.trailing[0], 'x');
    EXPECT_TRUE(p.last_has_trailing);

    EXPECT_THROW(lzend_parse(Bytes{}), Error);
}

TEST(LzEnd, MatchesReferenceParser) {
    oracle::Rng rng(22);
    for (int t = 0; t < 300; ++t) {
        const auto in = random_input(rng, 200);
        const auto fast = lzend_parse(in);
        const auto slow = lzend_parse_reference(in);
        check_valid(fast, in);
        check_valid(slow, in);
        ASSERT_EQ(fast.copies, slow.copies);
        ASSERT_EQ(fast.ends, slow.ends);
        ASSERT_EQ(fast.trailing, slow.trailing);
    }
}

TEST(LzEnd, ExtractMatchesPlainCopy) {
    oracle::Rng rng(23);
    for (int t = 0; t < 40; ++t) {
        const auto in = random_input(rng, 20000);
        const auto parse = lzend_parse(in);
        check_valid(parse, in);
        std::size_t prev_size = 0;
        for (unsigned ds : {256u, 64u, 16u, 4u, 1u}) {
            const auto text = LzEndText::encode(parse, ds);
            ByteWriter w;
            text.serialize(w);
            EXPECT_GE(w.size(), prev_size);
            prev_size = w.size();
            ByteReader r(w.data());
            const auto back = LzEndText::deserialize(r);
            EXPECT_EQ(back.extract(0, in.size()), in);
            for (int q = 0; q < 50; ++q) {
                const std::uint64_t a = oracle::uniform(rng, 0, in.size());
                const std::uint64_t len = oracle::uniform(rng, 0, in.size() - a);
                ASSERT_EQ(back.extract(a, len), Bytes(in.begin() + static_cast<std::ptrdiff_t>(a),
                                                      in.begin() + static_cast<std::ptrdiff_t>(a + len)));
            }
            EXPECT_TRUE(back.extract(in.size() / 2, 0).empty());
            EXPECT_THROW(back.extract(in.size(), 1), Error);
        }
    }
}

TEST(Lzma, RoundTripAndCorruption) {
    oracle::Rng rng(24);
    const auto in = to_bytes(oracle::repetitive_bytes(rng, 100, 50, 4, 0.02));
    const auto packed = lzma::compress(in);
    EXPECT_LT(packed.size(), in.size());
    EXPECT_EQ(lzma::decompress(packed, in.size()), in);
    auto broken = packed;
    broken.resize(broken.size() / 2);
    EXPECT_THROW(lzma::decompress(broken, in.size()), Error);
}

TEST(VLz, ThresholdFlags) {
    Values ten(10);
    std::iota(ten.begin(), ten.end(), 1);  // ten unit gaps: 10 Vbyte bytes
    Values nine(9);
    std::iota(nine.begin(), nine.end(), 1);
    const std::vector<Values> lists{{1}, ten, nine};
    const auto idx = vlz_build(lists, 100);
    EXPECT_FALSE(idx.compressed(0));
    EXPECT_TRUE(idx.compressed(1));
    EXPECT_FALSE(idx.compressed(2));
    EXPECT_EQ(vlz_fetch(idx, 0), (Values{1}));
    EXPECT_EQ(vlz_fetch(idx, 1), ten);
    EXPECT_THROW(vlz_fetch(idx, 3), Error);
}

TEST(VLz, RoundTripRandomLists) {
    oracle::Rng rng(25);
    std::vector<Values> lists;
    for (int i = 0; i < 1000; ++i)
        lists.push_back(i % 2 ? oracle::runny_list(rng, oracle::uniform(rng, 1, 500), 100)
                              : oracle::random_list(rng, oracle::uniform(rng, 1, 500), 60000));
    const auto idx = vlz_build(lists, 60000);
    ByteWriter w;
    serialize(idx, w);
    ByteReader r(w.data());
    const auto back = deserialize_vlz(r);
    EXPECT_TRUE(r.done());
    for (std::size_t i = 0; i < lists.size(); ++i) {
        ASSERT_EQ(vlz_fetch(back, i), lists[i]);
        const bool big = encode(to_gaps(lists[i]), CodecId::Vbyte).size() >= kDefaultMinBcsSize;
        ASSERT_EQ(back.compressed(i), big);
    }
}

TEST(VLz, CorruptPayload) {
    Values l(200);
    std::iota(l.begin(), l.end(), 1);
    auto idx = vlz_build(std::vector<Values>{l}, 1000);
    ASSERT_TRUE(idx.compressed(0));
    for (auto& b : idx.payload) b ^= 0x5a;
    EXPECT_THROW(vlz_fetch(idx, 0), Error);
}

TEST(LzEndPostings, RoundTripAndIntersect) {
    oracle::Rng rng(26);
    std::vector<Values> lists;
    const Value u = 60000;
    for (int i = 0; i < 300; ++i)
        lists.push_back(i % 2 ? oracle::runny_list(rng, oracle::uniform(rng, 1, 400), 100)
                              : oracle::random_list(rng, oracle::uniform(rng, 1, 400), u));
    for (unsigned ds : {4u, 256u}) {
        const auto idx = lzend_build(lists, u, ds);
        ByteWriter w;
        serialize(idx, w);
        ByteReader r(w.data());
        const auto back = deserialize_lzend(r);
        for (std::size_t i = 0; i < lists.size(); ++i) ASSERT_EQ(lzend_fetch(back, i), lists[i]);
        for (int q = 0; q < 50; ++q) {
            const std::size_t a = oracle::uniform(rng, 0, lists.size() - 1);
            const std::size_t b = oracle::uniform(rng, 0, lists.size() - 1);
            const ListRepr la = lzend_list(back, a), lb = lzend_list(back, b);
            std::vector<const ListRepr*> ptrs{&la, &lb};
            ASSERT_EQ(intersect_merge(ptrs), oracle::brute_intersect({lists[a], lists[b]}));
        }
    }
    EXPECT_THROW(lzend_fetch(lzend_build(lists, u, 4), lists.size()), Error);
}
