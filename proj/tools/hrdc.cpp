// hrdc: build, query and benchmark compressed inverted indexes.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "hrdc/bench.hpp"
#include "hrdc/error.hpp"
#include "hrdc/index.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hrdc;
using namespace hrdc::bench;

namespace {

constexpr const char* kFailedFormat = "hrdc-index-failed";

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) fail(ErrorCode::Io, "cannot read " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::CorruptStream, p.string() + ": " + e.what());
    }
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(1) << "\n";
    if (!out) fail(ErrorCode::Io, "cannot write " + p.string());
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& kvs) {
    std::map<std::string, std::string> out;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) fail(ErrorCode::InvalidArgument, "expected K=V, got " + kv);
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return out;
}

// Sizes of the files an index manifest lists, taken from disk.
std::map<std::string, std::uint64_t> index_sizes(const fs::path& dir) {
    const json m = read_json(dir / "manifest.json");
    std::map<std::string, std::uint64_t> out;
    for (const auto& [name, _] : m.at("files").items()) out[name] = fs::file_size(dir / name);
    return out;
}

struct Built {
    bool ok = false;
    std::string error;
};

// Saves the index `make` returns into `out`; a failure leaves a manifest that
// later turns into a FAILED report row.
template <class Make>
Built build_index(Make&& make, const fs::path& corpus_dir, Scenario sc, const MethodConfig& cfg,
                  const fs::path& out) {
    fs::create_directories(out);
    try {
        const Index ix = make();
        ix.save(out.string());
        json m = read_json(out / "manifest.json");
        m["corpus"] = fs::absolute(corpus_dir).string();
        write_json(out / "manifest.json", m);
        return {true, {}};
    } catch (const std::exception& e) {
        write_json(out / "manifest.json", json{{"format", kFailedFormat},
                                               {"scenario", std::string(to_string(sc))},
                                               {"method", cfg.name},
                                               {"parameterization", cfg.parameterization()},
                                               {"label", cfg.label()},
                                               {"error", e.what()}});
        return {false, e.what()};
    }
}

Measurement search_index(const fs::path& dir, const QuerySet& q, int reps) {
    const json m = read_json(dir / "manifest.json");
    if (m.value("format", "") == kFailedFormat) {
        Measurement f;
        f.scenario = m.at("scenario");
        f.kind = std::string(to_string(q.kind));
        f.method = m.at("method");
        f.parameterization = m.at("parameterization");
        f.label = m.at("label");
        f.failed = true;
        f.error = m.at("error");
        return f;
    }
    const auto ix = Index::load(dir.string());
    return run_experiment(ix, index_sizes(dir), q, reps);
}

std::vector<Measurement> read_all_measurements(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<Measurement> out;
    for (const auto& f : files) {
        auto ms = read_measurements(f.string());
        out.insert(out.end(), ms.begin(), ms.end());
    }
    return out;
}

int finish_report(const std::vector<Measurement>& ms, const fs::path& out) {
    const auto failed = emit_report(ms, out.string());
    std::ifstream in(out / "summary.txt");
    std::cout << in.rdbuf();
    if (failed) std::cerr << "warning: " << failed << " failed configuration row(s)\n";
    return 0;
}

void print_warnings(const QuerySet& q) {
    for (const auto& w : q.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed inverted indexes for repetitive collections"};
    app.require_subcommand(1);

    // gen-corpus
    auto* gc = app.add_subcommand("gen-corpus", "Generate a synthetic versioned corpus");
    CorpusSpec spec;
    std::string gc_out;
    gc->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    gc->add_option("--base-docs", spec.base_docs, "Base documents")->capture_default_str();
    gc->add_option("--versions", spec.versions, "Versions per base document")->capture_default_str();
    gc->add_option("--mutation-rate", spec.mutation_rate, "Fraction of tokens edited per version")
        ->capture_default_str();
    gc->add_option("--tokens", spec.tokens, "Tokens per base document")->capture_default_str();
    gc->add_option("--vocab", spec.vocab_size, "Vocabulary size")->capture_default_str();
    gc->add_option("--zipf", spec.zipf, "Zipf exponent of word frequencies")->capture_default_str();
    gc->add_option("--out", gc_out, "Output directory")->required();

    // build
    auto* bd = app.add_subcommand("build", "Build an index over a corpus directory");
    std::string bd_corpus, bd_scenario, bd_method, bd_out;
    std::vector<std::string> bd_params;
    std::uint32_t bd_sample_ct = 64;
    bd->add_option("--corpus", bd_corpus, "Corpus directory")->required();
    bd->add_option("--scenario", bd_scenario, "nonpos or pos")->required()->check(CLI::IsMember({"nonpos", "pos"}));
    bd->add_option("--method", bd_method, "Method name (see 'methods')")->required();
    bd->add_option("--param", bd_params, "Method parameter K=V (repeatable)");
    bd->add_option("--sample-ct", bd_sample_ct, "Text sampling period (pos)")->capture_default_str();
    bd->add_option("--out", bd_out, "Index directory")->required();

    // gen-queries
    auto* gq = app.add_subcommand("gen-queries", "Generate a query set for an index");
    std::string gq_index, gq_kind, gq_out, gq_corpus;
    std::size_t gq_count = 1000;
    std::uint64_t gq_seed = 1;
    gq->add_option("--index", gq_index, "Index directory")->required();
    gq->add_option("--kind", gq_kind, "wa, wb, phrase2, phrase5, extract80 or extract13000")->required();
    gq->add_option("--count", gq_count, "Number of queries")->capture_default_str();
    gq->add_option("--seed", gq_seed, "Random seed")->capture_default_str();
    gq->add_option("--corpus", gq_corpus, "Corpus directory (default: the one the index was built from)");
    gq->add_option("--out", gq_out, "Query file")->required();

    // search
    auto* se = app.add_subcommand("search", "Time a query set against an index");
    std::string se_index, se_queries, se_out;
    int se_reps = 5;
    se->add_option("--index", se_index, "Index directory")->required();
    se->add_option("--queries", se_queries, "Query file")->required();
    se->add_option("--reps", se_reps, "Repetitions (median reported)")->capture_default_str();
    se->add_option("--out", se_out, "Measurement file (.json)")->required();

    // report
    auto* rp = app.add_subcommand("report", "Write plot data and a summary table");
    std::string rp_in, rp_out;
    rp->add_option("--in", rp_in, "Directory of measurement files")->required();
    rp->add_option("--out", rp_out, "Report directory")->required();

    // run
    auto* rn = app.add_subcommand("run", "Build, query and report every configuration in one go");
    std::string rn_corpus, rn_work, rn_out;
    std::vector<std::string> rn_scenarios{"nonpos", "pos"}, rn_methods, rn_kinds;
    std::size_t rn_count = 1000, rn_extract_count = 1000;
    int rn_reps = 5;
    std::uint64_t rn_seed = 1;
    std::uint32_t rn_sample_ct = 64;
    rn->add_option("--corpus", rn_corpus, "Corpus directory")->required();
    rn->add_option("--work", rn_work, "Directory for indexes and measurements")->required();
    rn->add_option("--out", rn_out, "Report directory")->required();
    rn->add_option("--scenario", rn_scenarios, "Scenarios")->capture_default_str();
    rn->add_option("--method", rn_methods, "Methods at their defaults (default: the full configuration grid)");
    rn->add_option("--kind", rn_kinds, "Query kinds (default: all that apply)");
    rn->add_option("--count", rn_count, "Queries per word/phrase set")->capture_default_str();
    rn->add_option("--extract-count", rn_extract_count, "Intervals per extract set")->capture_default_str();
    rn->add_option("--reps", rn_reps, "Repetitions")->capture_default_str();
    rn->add_option("--seed", rn_seed, "Query seed")->capture_default_str();
    rn->add_option("--sample-ct", rn_sample_ct, "Text sampling period (pos)")->capture_default_str();

    // query / extract / methods
    auto* qy = app.add_subcommand("query", "Answer one query");
    std::string qy_index, qy_pattern;
    qy->add_option("--index", qy_index, "Index directory")->required();
    qy->add_option("pattern", qy_pattern, "Words (AND for nonpos, phrase for pos)")->required();
    auto* ex = app.add_subcommand("extract", "Print a text interval of a positional index");
    std::string ex_index;
    std::uint64_t ex_start = 0, ex_len = 0;
    ex->add_option("--index", ex_index, "Index directory")->required();
    ex->add_option("--start", ex_start, "Start offset")->required();
    ex->add_option("--length", ex_len, "Length in bytes")->required();
    auto* mt = app.add_subcommand("methods", "List method names and default parameters");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gc) {
            const auto c = gen_corpus(spec);
            save_corpus(c, gc_out, spec.to_json());
            std::cout << c.doc_count() << " documents, " << c.text.size() << " bytes -> " << gc_out << "\n";
        } else if (*bd) {
            const auto sc = scenario_from_string(bd_scenario);
            const auto cfg = method_config(bd_method, parse_params(bd_params), sc);
            const auto corpus = load_corpus(bd_corpus);
            const auto r = build_index([&] { return Index::build(corpus, sc, cfg, bd_sample_ct); }, bd_corpus, sc,
                                       cfg, bd_out);
            if (!r.ok) {
                std::cerr << "warning: build of " << cfg.label() << " failed: " << r.error << "\n";
                return 0;
            }
            const auto sizes = index_sizes(bd_out);
            std::cout << cfg.label() << " (" << bd_scenario << "):";
            for (const auto& [f, n] : sizes) std::cout << " " << f << "=" << n;
            std::cout << "\n";
        } else if (*gq) {
            const auto kind = query_kind_from_string(gq_kind);
            const json m = read_json(fs::path(gq_index) / "manifest.json");
            if (m.value("format", "") == kFailedFormat) fail(ErrorCode::InvalidArgument, "index build had failed");
            const std::string cdir = gq_corpus.empty() ? m.at("corpus").get<std::string>() : gq_corpus;
            const auto ix = Index::load(gq_index);
            const auto q = gen_queries(load_corpus(cdir), ix.vocab(), kind, gq_count, gq_seed);
            write_queries(q, gq_out);
            print_warnings(q);
            std::cout << q.size() << " " << gq_kind << " queries -> " << gq_out << "\n";
        } else if (*se) {
            const auto q = read_queries(se_queries);
            const auto m = search_index(se_index, q, se_reps);
            write_measurements({m}, se_out);
            if (m.failed) {
                std::cerr << "warning: " << m.label << " FAILED: " << m.error << "\n";
            } else {
                std::cout << m.label << " " << m.kind << ": ratio " << m.ratio << "% time " << m.time_us
                          << " us/query\n";
            }
        } else if (*rp) {
            return finish_report(read_all_measurements(rp_in), rp_out);
        } else if (*rn) {
            const auto corpus = load_corpus(rn_corpus);
            const fs::path work(rn_work);
            fs::create_directories(work / "measurements");
            std::vector<Measurement> all;
            for (const auto& scs : rn_scenarios) {
                const auto sc = scenario_from_string(scs);
                std::vector<QueryKind> kinds;
                if (rn_kinds.empty()) {
                    kinds = {QueryKind::Wa, QueryKind::Wb, QueryKind::Phrase2, QueryKind::Phrase5};
                    if (sc == Scenario::Positional) {
                        kinds.push_back(QueryKind::Extract80);
                        kinds.push_back(QueryKind::Extract13000);
                    }
                } else {
                    for (const auto& k : rn_kinds) {
                        const auto kind = query_kind_from_string(k);
                        if (!is_extract(kind) || sc == Scenario::Positional) kinds.push_back(kind);
                    }
                }
                const Inverted inv = invert(corpus, sc);
                StoreBuilder builder(inv.lists, inv.universe);
                std::shared_ptr<const TextStore> text;
                if (sc == Scenario::Positional) {
                    std::cerr << "[" << scs << "] compressing text\n";
                    text = std::make_shared<TextStore>(TextStore::compress(
                        std::span(reinterpret_cast<const std::uint8_t*>(corpus.text.data()), corpus.text.size()),
                        rn_sample_ct));
                }
                std::map<QueryKind, QuerySet> sets;
                bool text_done = false;
                std::vector<MethodConfig> configs;
                if (rn_methods.empty()) {
                    configs = configuration_grid(sc);
                } else {
                    for (const auto& name : rn_methods) configs.push_back(method_config(name, {}, sc));
                }
                for (const auto& cfg : configs) {
                    std::string slug = cfg.label();
                    std::replace_if(slug.begin(), slug.end(), [](char c) { return c == ':' || c == ','; }, '_');
                    const auto dir = work / scs / slug;
                    std::cerr << "[" << scs << "] " << cfg.label() << "\n";
                    const auto r = build_index(
                        [&] { return Index::assemble(inv, builder.build(cfg), text, corpus.text.size()); }, rn_corpus,
                        sc, cfg, dir);
                    if (!r.ok) std::cerr << "warning: build of " << cfg.label() << " failed: " << r.error << "\n";
                    std::unique_ptr<Index> ix;
                    if (r.ok) ix = std::make_unique<Index>(Index::load(dir.string()));
                    for (auto kind : kinds) {
                        if (is_extract(kind) && (text_done || !r.ok)) continue;
                        if (!r.ok) {
                            all.push_back(failed_measurement(scs, std::string(to_string(kind)), cfg, r.error));
                            continue;
                        }
                        if (!sets.count(kind)) {
                            const auto n = is_extract(kind) ? rn_extract_count : rn_count;
                            sets[kind] = gen_queries(corpus, ix->vocab(), kind, n, rn_seed);
                            print_warnings(sets[kind]);
                            write_queries(sets[kind], (work / scs / (std::string(to_string(kind)) + ".q")).string());
                        }
                        all.push_back(run_experiment(*ix, index_sizes(dir), sets[kind], rn_reps));
                    }
                    if (r.ok && sc == Scenario::Positional) text_done = true;
                }
            }
            write_measurements(all, (work / "measurements" / "run.json").string());
            return finish_report(all, rn_out);
        } else if (*qy) {
            const auto ix = Index::load(qy_index);
            const auto ids = ix.parse_query(qy_pattern);
            if (!ids) {
                std::cout << "0 results\n";
            } else if (ix.scenario() == Scenario::NonPositional) {
                const auto docs = ix.locate_and(*ids);
                std::cout << docs.size() << " documents\n";
                for (auto d : docs) std::cout << d << "\n";
            } else {
                const auto occ = ix.locate_phrase(*ids);
                std::cout << occ.size() << " occurrences\n";
                for (const auto& o : occ) std::cout << o.doc << " " << o.offset << "\n";
            }
        } else if (*ex) {
            const auto ix = Index::load(ex_index);
            const auto b = ix.extract(ex_start, ex_start + ex_len);
            std::cout.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
        } else if (*mt) {
            for (const auto& n : method_names())
                std::cout << method_config(n, {}, Scenario::NonPositional).label() << "   [pos: "
                          << method_config(n, {}, Scenario::Positional).label() << "]\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
