#include "hrdc/bench.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "hrdc/error.hpp"

namespace hrdc::bench {

namespace fs = std::filesystem;
using json = nlohmann::json;
using u64 = std::uint64_t;

namespace {

// Library distributions differ between standard libraries; these do not.
struct Rng {
    explicit Rng(u64 seed) : g(seed) {}
    u64 below(u64 n) { return n == 0 ? 0 : g() % n; }
    double unit() { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
    std::mt19937_64 g;
};

struct Tok {
    std::uint32_t word;
    std::uint8_t sep;
};

constexpr const char* kSeps[] = {" ", ", ", ". ", "\n"};

std::uint8_t draw_sep(Rng& r) {
    const double x = r.unit();
    return x < 0.88 ? 0 : x < 0.93 ? 1 : x < 0.98 ? 2 : 3;
}

std::vector<std::string> make_words(Rng& r, std::uint32_t n) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    out.reserve(n);
    while (out.size() < n) {
        const auto rank = out.size();
        const std::size_t len = 1 + static_cast<std::size_t>(std::log10(rank + 1.0));
        std::string w(len, 'a');
        for (auto& c : w) c = static_cast<char>('a' + r.below(26));
        if (seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
}

std::string fmt(double v, int prec) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
}

std::uint64_t file_bytes(const std::map<std::string, u64>& sizes, const std::string& name) {
    const auto it = sizes.find(name);
    if (it == sizes.end()) fail(ErrorCode::InvalidArgument, "index has no " + name);
    return it->second;
}

}  // namespace

// ---- corpus ------------------------------------------------------------------

void CorpusSpec::validate() const {
    require(base_docs > 0 && versions > 0 && tokens > 0 && vocab_size > 0, ErrorCode::InvalidArgument,
            "corpus sizes must be positive");
    require(mutation_rate >= 0.0 && mutation_rate <= 1.0, ErrorCode::InvalidArgument,
            "mutation rate must be in [0, 1]");
    require(zipf > 0.0, ErrorCode::InvalidArgument, "zipf exponent must be positive");
}

std::string CorpusSpec::to_json() const {
    json j;
    j["seed"] = seed;
    j["base_docs"] = base_docs;
    j["versions"] = versions;
    j["mutation_rate"] = mutation_rate;
    j["tokens"] = tokens;
    j["vocab_size"] = vocab_size;
    j["zipf"] = zipf;
    return json{{"spec", j}}.dump();
}

Corpus gen_corpus(const CorpusSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const auto words = make_words(rng, spec.vocab_size);
    std::vector<double> cdf(spec.vocab_size);
    double acc = 0;
    for (std::uint32_t r = 0; r < spec.vocab_size; ++r) cdf[r] = acc += std::pow(r + 1.0, -spec.zipf);
    auto draw = [&] {
        const double x = rng.unit() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
        const auto r = static_cast<std::uint32_t>(it - cdf.begin());
        return Tok{std::min(r, spec.vocab_size - 1), draw_sep(rng)};
    };
    Corpus c;
    for (std::uint32_t b = 0; b < spec.base_docs; ++b) {
        std::vector<Tok> doc(spec.tokens);
        for (auto& t : doc) t = draw();
        for (std::uint32_t v = 0; v < spec.versions; ++v) {
            if (v > 0) {
                const auto m = static_cast<u64>(std::ceil(spec.mutation_rate * static_cast<double>(spec.tokens)));
                for (u64 i = 0; i < m; ++i) {
                    const double op = rng.unit();
                    if (op < 0.6 || (op >= 0.8 && doc.size() == 1)) {
                        doc[rng.below(doc.size())] = draw();
                    } else if (op < 0.8) {
                        doc.insert(doc.begin() + static_cast<std::ptrdiff_t>(rng.below(doc.size() + 1)), draw());
                    } else {
                        doc.erase(doc.begin() + static_cast<std::ptrdiff_t>(rng.below(doc.size())));
                    }
                }
            }
            c.doc_starts.push_back(c.text.size());
            for (std::size_t i = 0; i < doc.size(); ++i) {
                c.text += words[doc[i].word];
                c.text += i + 1 == doc.size() ? "\n" : kSeps[doc[i].sep];
            }
        }
    }
    return c;
}

// ---- queries -----------------------------------------------------------------

std::string_view to_string(QueryKind k) noexcept {
    switch (k) {
        case QueryKind::Wa: return "wa";
        case QueryKind::Wb: return "wb";
        case QueryKind::Phrase2: return "phrase2";
        case QueryKind::Phrase5: return "phrase5";
        case QueryKind::Extract80: return "extract80";
        case QueryKind::Extract13000: return "extract13000";
    }
    return "?";
}

QueryKind query_kind_from_string(std::string_view s) {
    for (auto k : {QueryKind::Wa, QueryKind::Wb, QueryKind::Phrase2, QueryKind::Phrase5, QueryKind::Extract80,
                   QueryKind::Extract13000})
        if (to_string(k) == s) return k;
    fail(ErrorCode::InvalidArgument, "unknown query kind " + std::string(s));
}

bool is_extract(QueryKind k) noexcept { return k == QueryKind::Extract80 || k == QueryKind::Extract13000; }

QuerySet gen_queries(const Corpus& corpus, const Vocabulary& vocab, QueryKind kind, std::size_t count,
                     std::uint64_t seed) {
    Rng rng(seed);
    QuerySet q;
    q.kind = kind;
    if (kind == QueryKind::Wa || kind == QueryKind::Wb) {
        std::vector<std::uint32_t> eligible;
        for (std::uint32_t id = 0; id < vocab.size(); ++id)
            if ((vocab.freq[id] < kFreqThreshold) == (kind == QueryKind::Wa)) eligible.push_back(id);
        for (std::size_t i = 0; i < eligible.size() && i < count; ++i)
            std::swap(eligible[i], eligible[i + rng.below(eligible.size() - i)]);
        if (eligible.size() < count)
            q.warnings.push_back("only " + std::to_string(eligible.size()) + " eligible words for " +
                                 std::string(to_string(kind)) + ", " + std::to_string(count) + " requested");
        eligible.resize(std::min(count, eligible.size()));
        for (auto id : eligible) q.patterns.push_back(vocab.word(id));
    } else if (kind == QueryKind::Phrase2 || kind == QueryKind::Phrase5) {
        const std::size_t k = kind == QueryKind::Phrase2 ? 2 : 5;
        std::vector<std::size_t> docs;
        std::vector<std::vector<Token>> tokens(corpus.doc_count());
        for (std::size_t d = 0; d < corpus.doc_count(); ++d) {
            tokens[d] = tokenize(corpus.doc(d));
            if (tokens[d].size() >= k) docs.push_back(d);
        }
        if (docs.empty()) {
            q.warnings.push_back("no document has " + std::to_string(k) + " words");
            return q;
        }
        for (std::size_t i = 0; i < count; ++i) {
            const auto& t = tokens[docs[rng.below(docs.size())]];
            const std::size_t at = rng.below(t.size() - k + 1);
            std::string p(t[at].word);
            for (std::size_t j = 1; j < k; ++j) (p += ' ') += t[at + j].word;
            q.patterns.push_back(std::move(p));
        }
    } else {
        const u64 width = kind == QueryKind::Extract80 ? 80 : 13000;
        std::size_t clamped = 0;
        for (std::size_t i = 0; i < count; ++i) {
            const auto d = rng.below(corpus.doc_count());
            const u64 len = corpus.doc(d).size();
            const u64 w = std::min(width, len);
            clamped += w < width;
            q.intervals.emplace_back(corpus.doc_starts[d] + rng.below(len - w + 1), w);
        }
        if (clamped)
            q.warnings.push_back(std::to_string(clamped) + " intervals clamped to their document length");
    }
    return q;
}

void write_queries(const QuerySet& q, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    out << "# kind: " << to_string(q.kind) << "\n";
    for (const auto& w : q.warnings) out << "# warning: " << w << "\n";
    if (is_extract(q.kind)) {
        for (const auto& [s, l] : q.intervals) out << s << " " << l << "\n";
    } else {
        for (const auto& p : q.patterns) out << p << "\n";
    }
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
}

QuerySet read_queries(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read " + path);
    QuerySet q;
    bool have_kind = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# kind: ", 0) == 0) {
            q.kind = query_kind_from_string(line.substr(8));
            have_kind = true;
        } else if (line.rfind("# warning: ", 0) == 0) {
            q.warnings.push_back(line.substr(11));
        } else if (!line.empty() && line[0] == '#') {
            continue;
        } else if (is_extract(q.kind) && have_kind) {
            std::istringstream s(line);
            u64 a = 0, l = 0;
            if (!(s >> a >> l)) fail(ErrorCode::InvalidArgument, "bad interval line: " + line);
            q.intervals.emplace_back(a, l);
        } else {
            q.patterns.push_back(line);
        }
    }
    if (!have_kind) fail(ErrorCode::InvalidArgument, path + " has no '# kind:' header");
    return q;
}

// ---- experiments ---------------------------------------------------------------

double cpu_user_seconds() {
    rusage u{};
    getrusage(RUSAGE_SELF, &u);
    return static_cast<double>(u.ru_utime.tv_sec) + static_cast<double>(u.ru_utime.tv_usec) * 1e-6;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

double per_query_us(double cpu_seconds, std::uint64_t queries) noexcept {
    return queries ? cpu_seconds * 1e6 / static_cast<double>(queries) : 0.0;
}

Measurement run_experiment(const Index& index, const std::map<std::string, std::uint64_t>& sizes,
                           const QuerySet& queries, int reps) {
    require(reps >= 1, ErrorCode::InvalidArgument, "repetitions must be >= 1");
    const auto& cfg = index.postings().config();
    Measurement m;
    m.scenario = std::string(to_string(index.scenario()));
    m.kind = std::string(to_string(queries.kind));
    m.raw_bytes = index.raw_bytes();
    m.queries = queries.size();
    const bool positional = index.scenario() == Scenario::Positional;
    if (is_extract(queries.kind)) {
        if (!index.text()) fail(ErrorCode::InvalidArgument, "extract queries need a positional index");
        m.method = "Text-RePair";
        m.parameterization = "sample_ct=" + std::to_string(index.text()->sample_ct());
        m.label = m.method + ":" + m.parameterization;
        m.index_bytes = file_bytes(sizes, "text.bin");
    } else {
        m.method = cfg.name;
        m.parameterization = cfg.parameterization();
        m.label = cfg.label();
        m.index_bytes = file_bytes(sizes, "postings.bin");
    }
    m.ratio = m.raw_bytes ? 100.0 * static_cast<double>(m.index_bytes) / static_cast<double>(m.raw_bytes) : 0.0;

    // non-positional timing excludes mapping words to ids
    std::vector<std::optional<std::vector<std::uint32_t>>> ids;
    if (!positional && !is_extract(queries.kind))
        for (const auto& p : queries.patterns) ids.push_back(index.parse_query(p));

    std::vector<double> times;
    for (int r = 0; r < reps; ++r) {
        u64 results = 0;
        const double t0 = cpu_user_seconds();
        if (is_extract(queries.kind)) {
            for (const auto& [a, l] : queries.intervals) results += index.extract(a, a + l).size();
        } else if (positional) {
            for (const auto& p : queries.patterns)
                if (const auto q = index.parse_query(p)) results += index.locate_phrase(*q).size();
        } else {
            for (const auto& q : ids)
                if (q) results += index.locate_and(*q).size();
        }
        const double t1 = cpu_user_seconds();
        times.push_back(per_query_us(t1 - t0, m.queries));
        m.results = results;
    }
    m.time_us = median(times);
    return m;
}

Measurement failed_measurement(std::string scenario, std::string kind, const MethodConfig& config,
                               std::string error) {
    Measurement m;
    m.scenario = std::move(scenario);
    m.kind = std::move(kind);
    m.method = config.name;
    m.parameterization = config.parameterization();
    m.label = config.label();
    m.failed = true;
    m.error = std::move(error);
    return m;
}

namespace {

json to_json_value(const Measurement& m) {
    return json{{"scenario", m.scenario},     {"kind", m.kind},
                {"method", m.method},         {"parameterization", m.parameterization},
                {"label", m.label},           {"ratio", m.ratio},
                {"time_us", m.time_us},       {"index_bytes", m.index_bytes},
                {"raw_bytes", m.raw_bytes},   {"queries", m.queries},
                {"results", m.results},       {"failed", m.failed},
                {"error", m.error}};
}

Measurement from_json_value(const json& j) {
    Measurement m;
    j.at("scenario").get_to(m.scenario);
    j.at("kind").get_to(m.kind);
    j.at("method").get_to(m.method);
    j.at("parameterization").get_to(m.parameterization);
    j.at("label").get_to(m.label);
    j.at("ratio").get_to(m.ratio);
    j.at("time_us").get_to(m.time_us);
    j.at("index_bytes").get_to(m.index_bytes);
    j.at("raw_bytes").get_to(m.raw_bytes);
    j.at("queries").get_to(m.queries);
    j.at("results").get_to(m.results);
    j.at("failed").get_to(m.failed);
    j.at("error").get_to(m.error);
    return m;
}

}  // namespace

std::string to_json(const Measurement& m) { return to_json_value(m).dump(); }

void write_measurements(const std::vector<Measurement>& ms, const std::string& path) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back(to_json_value(m));
    const std::string s = arr.dump(1) + "\n";
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::vector<Measurement> read_measurements(const std::string& path) {
    const auto bytes = read_file(path);
    std::vector<Measurement> out;
    try {
        const json arr = json::parse(bytes.begin(), bytes.end());
        for (const auto& j : arr) out.push_back(from_json_value(j));
    } catch (const json::exception& e) {
        fail(ErrorCode::CorruptStream, path + ": " + e.what());
    }
    return out;
}

std::size_t emit_report(std::vector<Measurement> ms, const std::string& out_dir) {
    require(!ms.empty(), ErrorCode::InvalidArgument, "report needs at least one measurement");
    fs::create_directories(out_dir);
    std::stable_sort(ms.begin(), ms.end(), [](const Measurement& a, const Measurement& b) {
        return std::tie(a.method, a.parameterization) < std::tie(b.method, b.parameterization);
    });
    std::map<std::string, std::string> dat;
    // scenario -> (method, parameterization) -> ratio
    std::map<std::string, std::map<std::pair<std::string, std::string>, double>> table;
    std::vector<std::string> failures;
    for (const auto& m : ms) {
        if (m.failed) {
            failures.push_back(m.scenario + " " + m.kind + " " + m.label + ": " + m.error);
            continue;
        }
        dat[m.scenario + "." + m.kind] += m.label + " " + fmt(m.ratio, 4) + " " + fmt(m.time_us, 3) + "\n";
        table[m.scenario][{m.method, m.parameterization}] = m.ratio;
    }
    for (const auto& [name, body] : dat) {
        const std::string s = "# label ratio_percent time_us\n" + body;
        write_file((fs::path(out_dir) / (name + ".dat")).string(),
                   std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    }
    std::ostringstream sum;
    sum << "Compression ratio = serialized index bytes / raw collection bytes x 100.\n"
        << "Non-positional sizes are reported as measured; no scaling factor is applied.\n"
        << "Text-RePair rows report the compressed text store of the positional index.\n";
    for (const auto& [scenario, rows] : table) {
        sum << "\n" << (scenario == "pos" ? "Positional" : "Non-positional") << " indexes\n";
        std::size_t w = 6;
        for (const auto& [key, r] : rows) w = std::max(w, key.first.size());
        sum << std::left << std::setw(static_cast<int>(w)) << "Method" << "  " << std::right << std::setw(10)
            << "Ratio" << "  Parameterization\n";
        for (const auto& [key, r] : rows)
            sum << std::left << std::setw(static_cast<int>(w)) << key.first << "  " << std::right << std::setw(9)
                << fmt(r, 4) << "%  " << key.second << "\n";
    }
    if (!failures.empty()) {
        sum << "\nFAILED (" << failures.size() << ")\n";
        for (const auto& f : failures) sum << "  " << f << "\n";
    }
    const std::string s = sum.str();
    write_file((fs::path(out_dir) / "summary.txt").string(),
               std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    return failures.size();
}

}  // namespace hrdc::bench
