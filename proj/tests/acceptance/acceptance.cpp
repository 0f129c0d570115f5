// Acceptance run: prints one "CRITERION n PASS|FAIL" line per criterion and
// exits non-zero when any of them fails.
//
//   acceptance [--only 1,2,...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hrdc/bench.hpp"
#include "hrdc/error.hpp"
#include "hrdc/gap_codecs.hpp"
#include "hrdc/index.hpp"
#include "hrdc/lz_postings.hpp"
#include "hrdc/lzend.hpp"
#include "hrdc/postings.hpp"
#include "hrdc/repair_postings.hpp"
#include "hrdc/text_store.hpp"
#include "support/oracles.hpp"

namespace {

using namespace hrdc;
using oracle::Rng;
using oracle::uniform;
using Values = std::vector<Value>;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool ran = false;
    bool pass = true;
    std::string detail;
    double secs = 0;
};

std::map<int, Verdict> verdicts;

void record(int id, bool pass, const std::string& detail, double secs) {
    auto& v = verdicts[id];
    v.ran = true;
    v.pass = pass;
    v.detail = detail;
    v.secs = secs;
    std::fprintf(stderr, "[criterion %d] %s %s (%.1f s)\n", id, pass ? "PASS" : "FAIL", detail.c_str(), secs);
}

template <class... A>
std::string fmt(const char* f, A... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

std::size_t log_uniform(Rng& rng, std::size_t hi) {
    const double x = std::uniform_real_distribution<double>(0, std::log(static_cast<double>(hi) + 1))(rng);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::exp(x)), 1, hi);
}

// ---- 1: codec round trips ---------------------------------------------------

Values random_gaps(Rng& rng, CodecId codec) {
    const bool narrow = codec == CodecId::Simple9 || codec == CodecId::PforDelta;
    const Value cap = narrow ? kSimple9Limit : (Value{1} << 40);
    const std::size_t n = log_uniform(rng, 5000);
    const Value max_gap = std::max<Value>(1, static_cast<Value>(std::exp(
                                                 std::uniform_real_distribution<double>(0, std::log(double(cap)))(rng))));
    Values g(n);
    switch (uniform(rng, 0, 3)) {
        case 0:
            for (auto& v : g) v = uniform(rng, 1, max_gap);
            break;
        case 1:  // small gaps with outliers
            for (auto& v : g) v = uniform(rng, 0, 9) == 0 ? uniform(rng, 1, max_gap) : uniform(rng, 1, 15);
            break;
        case 2:  // unit runs
            for (std::size_t i = 0; i < n;) {
                g[i++] = uniform(rng, 1, max_gap);
                for (std::size_t r = uniform(rng, 0, 60); r > 0 && i < n; --r) g[i++] = 1;
            }
            break;
        default:
            std::fill(g.begin(), g.end(), 1);
    }
    return g;
}

void criterion1() {
    const auto t0 = Clock::now();
    Rng rng(1001);
    const CodecId codecs[] = {CodecId::Vbyte, CodecId::Rice, CodecId::Simple9, CodecId::PforDelta, CodecId::RiceRuns};
    std::size_t lists = 0, bad = 0;
    std::string first;
    for (CodecId codec : codecs) {
        for (int t = 0; t < 10000; ++t, ++lists) {
            const Values gaps = random_gaps(rng, codec);
            const Values values = from_gaps(gaps);
            CodecParams base;
            if (codec == CodecId::PforDelta && t % 2)
                base.pfor.pfdThreshold = static_cast<unsigned>(log_uniform(rng, kMaxPforBlock));
            CodecParams params = select_params(codec, gaps, base);
            if (codec == CodecId::Rice && t % 3 == 0)
                params.rice.b = std::min<unsigned>(kMaxRiceWidth, params.rice.b + static_cast<unsigned>(uniform(rng, 1, 3)));
            bool ok = false;
            try {
                const auto payload = encode(gaps, codec, params);
                const auto dec = decode(payload, codec, gaps.size(), params);
                const auto stream = encode_stream(gaps, codec, params);
                ok = dec == gaps && decode_stream(stream) == gaps && to_gaps(from_gaps(dec)) == gaps &&
                     from_gaps(dec) == values;
            } catch (const std::exception& e) {
                if (first.empty()) first = e.what();
            }
            if (!ok) {
                ++bad;
                if (first.empty()) first = fmt("%s list %d", std::string(to_string(codec)).c_str(), t);
            }
        }
    }
    const double s = since(t0);
    record(1, bad == 0 && s < 60,
           fmt("%zu lists over 5 codecs, %zu mismatches%s%s", lists, bad, first.empty() ? "" : ", first: ",
               first.c_str()),
           s);
}

// ---- 2, 9 and the small-grammar part of 3 -----------------------------------

struct Instance {
    std::vector<Values> lists;
    std::vector<Value> shifts;
};

constexpr Value kUniverse = 100000;

Instance make_instance(Rng& rng) {
    Instance in;
    const std::size_t n = uniform(rng, 2, 5);
    std::vector<std::size_t> lens(n);
    for (auto& l : lens) l = log_uniform(rng, 5000);
    const std::size_t longest = *std::max_element(lens.begin(), lens.end());
    const bool runny = uniform(rng, 0, 4) == 0;
    const Values pool = runny ? oracle::runny_list(rng, std::min<std::size_t>(2 * longest, 20000), 12)
                              : oracle::random_list(rng, uniform(rng, longest, std::min<Value>(kUniverse, 3 * longest)),
                                                    kUniverse);
    for (std::size_t len : lens) {
        std::set<Value> s;
        while (s.size() < len) {
            const Value v = uniform(rng, 0, 9) < 8 ? pool[uniform(rng, 0, pool.size() - 1)] : uniform(rng, 1, kUniverse);
            if (v <= kUniverse) s.insert(v);
        }
        in.lists.emplace_back(s.begin(), s.end());
        in.shifts.push_back(uniform(rng, 0, 3));
    }
    return in;
}

Values expand_symbol(const RePairGrammar& g, Symbol s) {
    Values out;
    std::vector<Symbol> stack{s};
    while (!stack.empty()) {
        const Symbol x = stack.back();
        stack.pop_back();
        if (g.is_rule(x)) {
            stack.push_back(g.rights[x - g.first_rule]);
            stack.push_back(g.lefts[x - g.first_rule]);
        } else {
            out.push_back(x);
        }
    }
    return out;
}

// Empty when the grammar is sound, else the first problem found.
std::string grammar_problem(const RePairGrammar& g, const std::vector<Values>& gap_lists, bool no_pairs) {
    const std::size_t r = g.rule_count();
    if (g.rights.size() != r || g.sums.size() != r || g.counts.size() != r) return "rule arrays differ in length";
    std::vector<Value> sums(r);
    std::vector<std::uint64_t> counts(r);
    auto sum = [&](Symbol s) { return g.is_rule(s) ? sums[s - g.first_rule] : Value{s}; };
    auto count = [&](Symbol s) { return g.is_rule(s) ? counts[s - g.first_rule] : std::uint64_t{1}; };
    for (std::size_t i = 0; i < r; ++i) {
        const Symbol self = g.first_rule + static_cast<Symbol>(i);
        if (g.lefts[i] >= self || g.rights[i] >= self) return fmt("rule %zu refers forward", i);
        if (g.lefts[i] == 0 || g.rights[i] == 0) return fmt("rule %zu covers a separator", i);
        sums[i] = sum(g.lefts[i]) + sum(g.rights[i]);
        counts[i] = count(g.lefts[i]) + count(g.rights[i]);
        if (sums[i] != g.sums[i] || counts[i] != g.counts[i]) return fmt("skip data of rule %zu", i);
    }
    Values joined, expanded;
    for (const auto& l : gap_lists) {
        joined.push_back(0);
        joined.insert(joined.end(), l.begin(), l.end());
    }
    expanded.reserve(joined.size());
    for (Symbol s : g.sequence) {
        if (s == 0) {
            expanded.push_back(0);
            continue;
        }
        const auto e = expand_symbol(g, s);
        expanded.insert(expanded.end(), e.begin(), e.end());
    }
    if (expanded != joined) return "expansion differs from the input";
    if (g.original_length != joined.size()) return "original length";
    if (no_pairs) {
        for (const auto& [k, c] : oracle::naive_pair_counts(g.sequence, true))
            if (c >= 2) return fmt("pair (%u,%u) occurs %zu times", k.first, k.second, c);
    }
    return {};
}

std::vector<std::uint8_t> serialized_plain(const RePairGrammar& g, std::span<const std::uint32_t> lengths,
                                           Value universe) {
    ByteWriter w;
    serialize(rp_with_variant(g, lengths, universe, RePairVariant::Plain, 0), w);
    return w.take();
}

struct GrammarTally {
    std::size_t grammars = 0;
    std::size_t bad = 0;
    std::string first;

    void add(const std::string& what, const std::string& problem) {
        ++grammars;
        if (problem.empty()) return;
        ++bad;
        if (first.empty()) first = what + ": " + problem;
    }
};

GrammarTally grammar_tally;

struct SmallRun {
    std::size_t instances = 0;
    std::size_t checks = 0;
    std::size_t bad = 0;
    std::string first;
    // instrumentation
    std::size_t skip_le_plain[3] = {0, 0, 0};  // Skip, SkipCM(64), SkipST
    std::size_t skewed = 0;
    std::size_t svs_lt_merge[2] = {0, 0};  // k = 4, 32
};

std::vector<const ListRepr*> ptrs(const std::vector<ListRepr>& v) {
    std::vector<const ListRepr*> out;
    for (const auto& r : v) out.push_back(&r);
    return out;
}

void small_suite(bool want2, bool want3, bool want9) {
    const auto t0 = Clock::now();
    Rng rng(2002);
    SmallRun run;
    auto check = [&](const char* method, std::size_t inst, const Values& got, const Values& want) {
        ++run.checks;
        if (got == want) return;
        ++run.bad;
        if (run.first.empty()) run.first = fmt("%s on instance %zu", method, inst);
    };
    for (std::size_t t = 0; t < 1000; ++t) {
        const Instance in = make_instance(rng);
        const std::size_t n = in.lists.size();
        const Values want = oracle::brute_intersect(in.lists);
        const Values want_shifted = oracle::brute_shifted_intersect(in.lists, in.shifts);
        std::vector<std::size_t> ids(n);
        for (std::size_t i = 0; i < n; ++i) ids[i] = i;
        std::size_t lo = SIZE_MAX, hi = 0;
        for (const auto& l : in.lists) {
            lo = std::min(lo, l.size());
            hi = std::max(hi, l.size());
        }
        const bool skewed = hi >= 100 * lo;
        run.skewed += skewed;
        ++run.instances;

        auto family = [&](const char* name, auto&& make, auto&& op, auto&& op_shifted, IntersectStats* stats) {
            std::vector<ListRepr> reps;
            for (const auto& l : in.lists) reps.push_back(make(l));
            const auto p = ptrs(reps);
            check(name, t, op(p, stats), want);
            check(name, t, op_shifted(p, in.shifts), want_shifted);
        };
        auto merge = [](auto& p, IntersectStats* s) { return intersect_merge(p, s); };
        auto merge_s = [](auto& p, const Values& sh) { return intersect_merge_shifted(p, sh); };
        auto svs = [](auto& p, IntersectStats* s) { return intersect_svs(p, s); };
        auto svs_s = [](auto& p, const Values& sh) { return intersect_svs_shifted(p, sh); };
        auto lookup = [](auto& p, IntersectStats* s) { return intersect_lookup(p, s); };
        auto lookup_s = [](auto& p, const Values& sh) { return intersect_lookup_shifted(p, sh); };
        auto repr = [](CodecId c, Sampling smp, std::optional<HybridConfig> h = std::nullopt) {
            return [=](const Values& l) { return build_list(l, kUniverse, c, smp, h); };
        };
        const HybridConfig dense{64};

        IntersectStats merge_stats, svs_stats[2];
        if (want2 || want9) {
            family("merge/Vbyte", repr(CodecId::Vbyte, Sampling::none()), merge, merge_s, &merge_stats);
            family("SvS k=4", repr(CodecId::Vbyte, Sampling::cm(4)), svs, svs_s, &svs_stats[0]);
            family("SvS k=32", repr(CodecId::Vbyte, Sampling::cm(32)), svs, svs_s, &svs_stats[1]);
        }
        if (want2) {
            family("merge/Rice", repr(CodecId::Rice, Sampling::none()), merge, merge_s, nullptr);
            family("merge/Rice-Runs", repr(CodecId::RiceRuns, Sampling::none()), merge, merge_s, nullptr);
            family("merge/Simple9", repr(CodecId::Simple9, Sampling::none()), merge, merge_s, nullptr);
            family("merge/PforDelta", repr(CodecId::PforDelta, Sampling::none()), merge, merge_s, nullptr);
            family("lookup B=16", repr(CodecId::Vbyte, Sampling::st(16)), lookup, lookup_s, nullptr);
            family("lookup B=128", repr(CodecId::Vbyte, Sampling::st(128)), lookup, lookup_s, nullptr);
            family("merge/VbyteB", repr(CodecId::Vbyte, Sampling::none(), dense), merge, merge_s, nullptr);
            family("SvS k=4 B", repr(CodecId::Vbyte, Sampling::cm(4), dense), svs, svs_s, nullptr);
            family("lookup B=16 B", repr(CodecId::Vbyte, Sampling::st(16), dense), lookup, lookup_s, nullptr);
            family("merge/RiceB", repr(CodecId::Rice, Sampling::none(), dense), merge, merge_s, nullptr);
        }
        if (skewed) {
            for (int k = 0; k < 2; ++k) run.svs_lt_merge[k] += svs_stats[k].decoded < merge_stats.decoded;
        }

        std::vector<Values> gap_lists;
        std::vector<std::uint32_t> lengths;
        for (const auto& l : in.lists) {
            gap_lists.push_back(to_gaps(l));
            lengths.push_back(static_cast<std::uint32_t>(l.size()));
        }
        const RePairGrammar g = repair_build(gap_lists, {});
        if (want3) {
            std::string problem = grammar_problem(g, gap_lists, true);
            if (problem.empty() && serialized_plain(g, lengths, kUniverse) !=
                                       serialized_plain(repair_build(gap_lists, {}), lengths, kUniverse))
                problem = "serialization differs between runs";
            grammar_tally.add(fmt("instance %zu", t), problem);
        }
        if (want2 || want9) {
            struct V {
                const char* name;
                RePairVariant v;
                unsigned param;
            };
            const V variants[] = {{"RePair", RePairVariant::Plain, 0},     {"RePair-Skip", RePairVariant::Skip, 0},
                                  {"RePair-Skip-CM k=1", RePairVariant::SkipCM, 1},
                                  {"RePair-Skip-CM k=64", RePairVariant::SkipCM, 64},
                                  {"RePair-Skip-ST B=1024", RePairVariant::SkipST, 1024},
                                  {"RePair-Skip-ST B=16", RePairVariant::SkipST, 16}};
            std::uint64_t expanded[6] = {};
            for (std::size_t vi = 0; vi < 6; ++vi) {
                const auto rp = rp_with_variant(g, lengths, kUniverse, variants[vi].v, variants[vi].param);
                IntersectStats st;
                check(variants[vi].name, t, rp_intersect(rp, ids, &st), want);
                check(variants[vi].name, t, rp_intersect_shifted(rp, ids, in.shifts), want_shifted);
                expanded[vi] = st.expanded;
            }
            run.skip_le_plain[0] += expanded[1] <= expanded[0];
            run.skip_le_plain[1] += expanded[3] <= expanded[0];
            run.skip_le_plain[2] += expanded[4] <= expanded[0];
        }
        if (want2) {
            const VLzIndex vlz = vlz_build(in.lists, kUniverse, 10);
            std::vector<ListRepr> vr;
            for (std::size_t i = 0; i < n; ++i) vr.push_back(vlz_list(vlz, i));
            check("Vbyte-LZMA", t, intersect_merge(ptrs(vr)), want);
            check("Vbyte-LZMA", t, intersect_merge_shifted(ptrs(vr), in.shifts), want_shifted);
            for (unsigned ds : {4u, 64u}) {
                const LzEndPostings lz = lzend_build(in.lists, kUniverse, ds);
                std::vector<ListRepr> lr;
                for (std::size_t i = 0; i < n; ++i) lr.push_back(lzend_list(lz, i));
                check("Vbyte-Lzend", t, intersect_merge(ptrs(lr)), want);
                check("Vbyte-Lzend", t, intersect_merge_shifted(ptrs(lr), in.shifts), want_shifted);
            }
        }
    }
    const double s = since(t0);
    if (want2)
        record(2, run.bad == 0 && s < 300,
               fmt("%zu instances, %zu intersections, %zu mismatches%s%s", run.instances, run.checks, run.bad,
                   run.first.empty() ? "" : ", first: ", run.first.c_str()),
               s);
    if (want9) {
        const std::size_t n = run.instances;
        const bool skip_ok = run.skip_le_plain[0] == n && run.skip_le_plain[1] == n && run.skip_le_plain[2] == n;
        const double svs4 = run.skewed ? double(run.svs_lt_merge[0]) / double(run.skewed) : 1.0;
        const double svs32 = run.skewed ? double(run.svs_lt_merge[1]) / double(run.skewed) : 1.0;
        record(9, skip_ok && run.skewed > 0 && svs4 >= 0.95 && svs32 >= 0.95,
               fmt("expanded <= plain: Skip %zu/%zu, Skip-CM %zu/%zu, Skip-ST %zu/%zu; SvS decodes less than merge "
                   "on %zu skewed instances: k=4 %.1f%%, k=32 %.1f%%",
                   run.skip_le_plain[0], n, run.skip_le_plain[1], n, run.skip_le_plain[2], n, run.skewed,
                   100 * svs4, 100 * svs32),
               s);
    }
}

// ---- 4: LZ-End ---------------------------------------------------------------

std::string parse_problem(const LzEndParse& p, const std::vector<std::uint8_t>& input) {
    if (p.length != input.size()) return "length";
    std::set<std::uint64_t> boundaries;
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.copies[i] > 0) {
            if (p.sources[i] >= i) return fmt("phrase %zu copies from a later phrase", i);
            const std::uint64_t e = p.ends[p.sources[i]];
            if (!boundaries.count(e)) return fmt("phrase %zu source does not end at a boundary", i);
            if (e + 1 < p.copies[i]) return fmt("phrase %zu copy too long", i);
            if (!std::equal(input.begin() + static_cast<std::ptrdiff_t>(e + 1 - p.copies[i]),
                            input.begin() + static_cast<std::ptrdiff_t>(e + 1),
                            input.begin() + static_cast<std::ptrdiff_t>(pos)))
                return fmt("phrase %zu copies different text", i);
        }
        const bool lit = i + 1 < p.size() || p.last_has_trailing;
        pos += p.copies[i] + (lit ? 1 : 0);
        if (p.ends[i] + 1 != pos) return fmt("phrase %zu end", i);
        if (lit && p.trailing[i] != input[pos - 1]) return fmt("phrase %zu literal", i);
        boundaries.insert(p.ends[i]);
    }
    if (pos != input.size()) return "phrases do not cover the input";
    return {};
}

void criterion4() {
    const auto t0 = Clock::now();
    Rng rng(4004);
    std::size_t inputs = 0, ranges = 0, bad = 0;
    std::string first;
    auto fail_once = [&](const std::string& what) {
        ++bad;
        if (first.empty()) first = what;
    };
    for (int t = 0; t < 1000; ++t, ++inputs) {
        const std::size_t n = log_uniform(rng, 65536);
        std::string s;
        if (t % 2 == 0) {
            s = oracle::random_bytes(rng, n, static_cast<unsigned>(uniform(rng, 1, 26)));
        } else {
            const std::size_t block = uniform(rng, 1, std::max<std::size_t>(1, n / 4));
            s = oracle::repetitive_bytes(rng, block, n / block + 1, static_cast<unsigned>(uniform(rng, 2, 8)),
                                         std::uniform_real_distribution<double>(0, 0.05)(rng));
            s.resize(n);
        }
        const std::vector<std::uint8_t> input(s.begin(), s.end());
        try {
            const LzEndParse parse = lzend_parse(input);
            if (auto p = parse_problem(parse, input); !p.empty()) fail_once(fmt("input %d: ", t) + p);
            std::vector<LzEndText> texts;
            for (unsigned ds : {4u, 16u, 64u, 256u}) {
                ByteWriter w;
                LzEndText::encode(parse, ds).serialize(w);
                ByteReader r(w.data());
                texts.push_back(LzEndText::deserialize(r));
            }
            for (int q = 0; q < 10; ++q, ++ranges) {
                const std::uint64_t a = uniform(rng, 0, n - 1);
                const std::uint64_t len = uniform(rng, 1, std::min<std::uint64_t>(n - a, 4096));
                const std::vector<std::uint8_t> want(input.begin() + static_cast<std::ptrdiff_t>(a),
                                                     input.begin() + static_cast<std::ptrdiff_t>(a + len));
                for (const auto& tx : texts)
                    if (tx.extract(a, len) != want) {
                        fail_once(fmt("input %d range [%llu,+%llu) ds=%u", t, (unsigned long long)a,
                                      (unsigned long long)len, tx.ds()));
                        break;
                    }
            }
        } catch (const std::exception& e) {
            fail_once(fmt("input %d: ", t) + e.what());
        }
    }
    const double s = since(t0);
    record(4, bad == 0 && s < 180,
           fmt("%zu inputs, %zu ranges x 4 ds values, %zu failures%s%s", inputs, ranges, bad,
               first.empty() ? "" : ", first: ", first.c_str()),
           s);
}

// ---- corpus criteria: 3 (corpus grammars), 5, 6, 7, 8 ---------------------------

struct QueryCase {
    std::string pattern;
    std::vector<std::uint64_t> docs;                               // non-positional answer
    std::vector<std::pair<std::uint64_t, std::uint64_t>> phrases;  // positional answer
};

std::string text_grammar_problem(const TextStore& ts, const std::string& text) {
    const auto lefts = ts.lefts();
    const auto rights = ts.rights();
    const std::uint32_t base = TextStore::kFirstRule;
    for (std::size_t i = 0; i < lefts.size(); ++i)
        if (lefts[i] >= base + i || rights[i] >= base + i) return fmt("rule %zu refers forward", i);
    std::string out;
    out.reserve(text.size());
    std::vector<std::uint32_t> stack;
    for (std::uint32_t s : ts.sequence()) {
        stack.push_back(s);
        while (!stack.empty()) {
            const std::uint32_t x = stack.back();
            stack.pop_back();
            if (x >= base) {
                stack.push_back(rights[x - base]);
                stack.push_back(lefts[x - base]);
            } else {
                out.push_back(static_cast<char>(x));
            }
        }
    }
    if (out != text) return "expansion differs from the text";
    const std::vector<std::uint32_t> seq(ts.sequence().begin(), ts.sequence().end());
    for (const auto& [k, c] : oracle::naive_pair_counts(seq, false))
        if (c >= 2) return fmt("pair (%u,%u) occurs %zu times", k.first, k.second, c);
    return {};
}

std::vector<std::uint8_t> bytes_of(const TextStore& ts) {
    ByteWriter w;
    ts.serialize(w);
    return w.take();
}

void corpus_suite(bool want3, bool want5, bool want6, bool want7, bool want8) {
    const auto t_all = Clock::now();
    const Corpus corpus = bench::gen_corpus(bench::CorpusSpec{});
    const std::uint64_t raw = corpus.text.size();
    std::fprintf(stderr, "corpus: %zu documents, %llu bytes\n", corpus.doc_count(), (unsigned long long)raw);

    std::shared_ptr<const TextStore> text;
    double text_secs = 0;
    if (want5 || want3 || want6 || want8) {
        const auto t0 = Clock::now();
        const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(corpus.text.data()),
                                                  corpus.text.size());
        auto ts = TextStore::compress(bytes, 64);
        text_secs = since(t0);
        std::fprintf(stderr, "text store: %zu rules, %zu symbols (%.1f s)\n", ts.rule_count(), ts.sequence_length(),
                     text_secs);
        if (want3) {
            std::string problem = text_grammar_problem(ts, corpus.text);
            if (problem.empty() && bytes_of(ts) != bytes_of(TextStore::compress(bytes, 64)))
                problem = "serialization differs between runs";
            grammar_tally.add("text grammar", problem);
        }
        ts.docs = invert(corpus, Scenario::Positional).docs;
        text = std::make_shared<const TextStore>(std::move(ts));
    }

    std::map<std::string, std::uint64_t> np_sizes;
    double np_secs = 0;
    if (want5 || want7 || want3) {
        const auto t5 = Clock::now();
        const oracle::ScannedCollection sc = oracle::scan_collection(corpus.text, corpus.doc_starts);
        const Inverted np = invert(corpus, Scenario::NonPositional);
        std::vector<std::pair<std::string, std::vector<QueryCase>>> sets;
        if (want5) {
            const bench::QueryKind kinds[] = {bench::QueryKind::Wa, bench::QueryKind::Wb, bench::QueryKind::Phrase2,
                                              bench::QueryKind::Phrase5};
            std::uint64_t seed = 5005;
            for (auto k : kinds) {
                const auto qs = bench::gen_queries(corpus, np.vocab, k, 1000, seed++);
                std::vector<QueryCase> cases;
                for (const auto& p : qs.patterns)
                    cases.push_back({p, oracle::scan_and(sc, p), oracle::scan_phrase(sc, p)});
                sets.emplace_back(std::string(bench::to_string(k)), std::move(cases));
            }
        }
        std::size_t configs = 0, queries = 0, bad = 0;
        std::string first;
        auto note = [&](const std::string& what) {
            ++bad;
            if (first.empty()) first = what;
        };

        for (Scenario scenario : {Scenario::NonPositional, Scenario::Positional}) {
            const bool pos = scenario == Scenario::Positional;
            if (pos && !want5 && !want3) continue;
            const auto ts0 = Clock::now();
            const Inverted inv = pos ? invert(corpus, scenario) : np;
            if (want3) {
                std::vector<Values> gaps;
                std::vector<std::uint32_t> lengths;
                for (const auto& l : inv.lists) {
                    gaps.push_back(to_gaps(l));
                    lengths.push_back(static_cast<std::uint32_t>(l.size()));
                }
                for (double rb : {0.0, method_config("RePair-Skip", {}, scenario).repair_break}) {
                    const auto g = repair_build(gaps, {rb});
                    std::string problem = grammar_problem(g, gaps, rb == 0.0);
                    if (problem.empty() && serialized_plain(g, lengths, inv.universe) !=
                                               serialized_plain(repair_build(gaps, {rb}), lengths, inv.universe))
                        problem = "serialization differs between runs";
                    grammar_tally.add(fmt("%s grammar, repairBreak=%g", std::string(to_string(scenario)).c_str(), rb),
                                      problem);
                }
                std::fprintf(stderr, "%s corpus grammars checked (%.1f s)\n",
                             std::string(to_string(scenario)).c_str(), since(ts0));
            }
            if (!want5 && !(want7 && !pos)) continue;
            StoreBuilder builder(inv.lists, inv.universe);
            for (const auto& cfg : configuration_grid(scenario)) {
                const auto tc = Clock::now();
                const std::string label = std::string(to_string(scenario)) + " " + cfg.label();
                try {
                    auto store = builder.build(cfg);
                    ByteWriter w;
                    store->serialize(w);
                    if (!pos) np_sizes[cfg.label()] = w.size();
                    const Index ix = Index::assemble(inv, std::move(store), pos ? text : nullptr, raw);
                    ++configs;
                    for (const auto& [kind, cases] : sets) {
                        std::size_t wrong = 0;
                        for (const auto& qc : cases) {
                            ++queries;
                            const auto ids = ix.parse_query(qc.pattern);
                            if (pos) {
                                std::vector<std::pair<std::uint64_t, std::uint64_t>> got;
                                if (ids)
                                    for (const auto& o : ix.locate_phrase(*ids)) got.emplace_back(o.doc, o.offset);
                                wrong += got != qc.phrases;
                            } else {
                                std::vector<std::uint64_t> got;
                                if (ids) got = ix.locate_and(*ids);
                                wrong += got != qc.docs;
                            }
                        }
                        if (wrong && first.empty())
                            first = fmt("%s %s: %zu wrong answers", label.c_str(), kind.c_str(), wrong);
                        bad += wrong;
                    }
                } catch (const std::exception& e) {
                    note(label + ": " + e.what());
                }
                std::fprintf(stderr, "  %-40s %.1f s\n", label.c_str(), since(tc));
            }
            if (!pos) np_secs = since(ts0);
        }
        const double s = since(t5) + text_secs;
        if (want5)
            record(5, bad == 0 && s < 1800,
                   fmt("%zu configurations, %zu queries, %zu wrong%s%s", configs, queries, bad,
                       first.empty() ? "" : ", first: ", first.c_str()),
                   s);
    }

    if (want3) {
        record(3, grammar_tally.bad == 0,
               fmt("%zu grammars, %zu with problems%s%s", grammar_tally.grammars, grammar_tally.bad,
                   grammar_tally.first.empty() ? "" : ", first: ", grammar_tally.first.c_str()),
               since(t_all));
    }

    if (want7) {
        auto size = [&](const std::string& label) -> double {
            auto it = np_sizes.find(label);
            return it == np_sizes.end() ? -1.0 : double(it->second);
        };
        const double vbyte = size("Vbyte"), rice = size("Rice"), runs = size("Rice-Runs");
        const double repair = size(method_config("RePair").label());
        double family = -1;
        std::string worst;
        for (const auto& [label, bytes] : np_sizes)
            if (label.rfind("RePair", 0) == 0 && double(bytes) > family) {
                family = double(bytes);
                worst = label;
            }
        const bool have = vbyte > 0 && rice > 0 && runs > 0 && repair > 0 && family > 0;
        const bool ok = have && family < runs && runs < rice && runs <= 0.32 * rice && repair <= 0.15 * vbyte &&
                        np_secs < 1200;
        auto pct = [&](double b) { return 100.0 * b / double(raw); };
        record(7, ok,
               fmt("Vbyte %.3f%%, Rice %.3f%%, Rice-Runs %.3f%%, RePair %.3f%%, largest RePair-family %s %.3f%%; "
                   "Rice-Runs/Rice %.3f (<= 0.32), RePair/Vbyte %.4f (<= 0.15)",
                   pct(vbyte), pct(rice), pct(runs), pct(repair), worst.c_str(), pct(family), runs / rice,
                   repair / vbyte),
               np_secs);
    }

    if (want6 && text) {
        const auto t0 = Clock::now();
        Rng rng(6006);
        std::size_t windows = 0, bad = 0;
        std::string first;
        const std::pair<std::uint64_t, int> shapes[] = {{80, 10000}, {13000, 1000}};
        for (std::uint32_t ct : {1u, 8u, 32u, 256u, 4096u}) {
            const auto bytes = bytes_of(text->resampled(ct));
            ByteReader r(bytes);
            const TextStore ts = TextStore::deserialize(r);
            for (auto [len, count] : shapes) {
                for (int q = 0; q < count; ++q, ++windows) {
                    const std::uint64_t a = uniform(rng, 0, raw - len);
                    const auto got = ts.extract(a, a + len);
                    if (std::string_view(reinterpret_cast<const char*>(got.data()), got.size()) !=
                        std::string_view(corpus.text).substr(a, len)) {
                        ++bad;
                        if (first.empty())
                            first = fmt("sample_ct=%u window [%llu,+%llu)", ct, (unsigned long long)a,
                                        (unsigned long long)len);
                    }
                }
            }
        }
        record(6, bad == 0,
               fmt("%zu windows over sample_ct {1,8,32,256,4096}, %zu mismatches%s%s", windows, bad,
                   first.empty() ? "" : ", first: ", first.c_str()),
               since(t0));
    }

    if (want8 && text) {
        const auto t0 = Clock::now();
        const std::uint32_t cts[] = {1, 2, 8, 32, 64, 256, 4096};
        Rng rng(8008);
        std::vector<std::uint64_t> starts(200);
        for (auto& a : starts) a = uniform(rng, 0, raw - 13000);
        std::vector<std::size_t> sizes;
        std::vector<double> times;
        for (std::uint32_t ct : cts) {
            const TextStore ts = text->resampled(ct);
            sizes.push_back(bytes_of(ts).size());
            std::vector<double> reps;
            std::uint64_t sink = 0;
            for (int rep = 0; rep < 5; ++rep) {
                const auto tr = Clock::now();
                for (auto a : starts) sink += ts.extract(a, a + 13000).size();
                reps.push_back(since(tr) * 1e6 / double(starts.size()));
            }
            if (sink == 0) std::fputc(' ', stderr);
            times.push_back(bench::median(reps));
        }
        bool sizes_ok = true, times_ok = true;
        std::ostringstream d;
        d << "size/us per window:";
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            d << " ct=" << cts[i] << ' ' << sizes[i] << "B/" << fmt("%.1f", times[i]);
            if (i > 0) {
                sizes_ok = sizes_ok && sizes[i] < sizes[i - 1];
                times_ok = times_ok && times[i - 1] <= 1.2 * times[i];
            }
        }
        d << (sizes_ok ? "; sizes strictly decreasing" : "; sizes NOT strictly decreasing")
          << (times_ok ? ", times non-increasing within 20%" : ", times NOT non-increasing within 20%");
        record(8, sizes_ok && times_ok, d.str(), since(t0));
    }
}

std::set<int> parse_only(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ',')) only.insert(std::stoi(item));
        } else {
            std::fprintf(stderr, "usage: %s [--only 1,2,...]\n", argv[0]);
            std::exit(2);
        }
    }
    if (only.empty())
        for (int i = 1; i <= 9; ++i) only.insert(i);
    return only;
}

}  // namespace

int main(int argc, char** argv) {
    const auto only = parse_only(argc, argv);
    auto want = [&](int c) { return only.count(c) > 0; };
    try {
        if (want(1)) criterion1();
        if (want(2) || want(3) || want(9)) small_suite(want(2), want(3), want(9));
        if (want(4)) criterion4();
        if (want(3) || want(5) || want(6) || want(7) || want(8))
            corpus_suite(want(3), want(5), want(6), want(7), want(8));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "aborted: %s\n", e.what());
    }
    bool all = true;
    for (int c : only) {
        const auto& v = verdicts[c];
        const bool pass = v.ran && v.pass;
        all = all && pass;
        std::printf("CRITERION %d %s %s (%.1f s)\n", c, pass ? "PASS" : "FAIL",
                    v.ran ? v.detail.c_str() : "not evaluated", v.secs);
    }
    return all ? 0 : 1;
}
