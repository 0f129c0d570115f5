#pragma once

// Benchmark harness: synthetic versioned corpora, query sets, timed runs and
// plot-ready reports.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hrdc/index.hpp"

namespace hrdc::bench {

struct CorpusSpec {
    std::uint64_t seed = 42;
    std::uint32_t base_docs = 100;
    std::uint32_t versions = 50;
    double mutation_rate = 0.005;
    std::uint32_t tokens = 2000;
    std::uint32_t vocab_size = 20000;
    double zipf = 0.8;

    void validate() const;
    std::string to_json() const;
};

// Document b*versions + v is version v of base document b.
Corpus gen_corpus(const CorpusSpec& spec);

enum class QueryKind { Wa, Wb, Phrase2, Phrase5, Extract80, Extract13000 };

std::string_view to_string(QueryKind k) noexcept;
QueryKind query_kind_from_string(std::string_view s);
bool is_extract(QueryKind k) noexcept;

inline constexpr std::uint64_t kFreqThreshold = 1000;

struct QuerySet {
    QueryKind kind = QueryKind::Wa;
    std::vector<std::string> patterns;  // word and phrase kinds
    std::vector<std::pair<std::uint64_t, std::uint64_t>> intervals;  // (start, length)
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return is_extract(kind) ? intervals.size() : patterns.size(); }
};

QuerySet gen_queries(const Corpus& corpus, const Vocabulary& vocab, QueryKind kind, std::size_t count,
                     std::uint64_t seed);
// One pattern per line, or "start length" per line; warnings as "# warning: ..." lines.
void write_queries(const QuerySet& q, const std::string& path);
QuerySet read_queries(const std::string& path);

struct Measurement {
    std::string scenario;
    std::string kind;
    std::string method;
    std::string parameterization;
    std::string label;
    double ratio = 0;    // percent of the raw collection
    double time_us = 0;  // median CPU user time per query
    std::uint64_t index_bytes = 0;
    std::uint64_t raw_bytes = 0;
    std::uint64_t queries = 0;
    std::uint64_t results = 0;  // occurrences or bytes returned in one repetition
    bool failed = false;
    std::string error;
};

double cpu_user_seconds();
double median(std::vector<double> v);
double per_query_us(double cpu_seconds, std::uint64_t queries) noexcept;

// Times `reps` passes over the query set. Index bytes come from `sizes`
// (the serialized files); extract kinds are charged the text store.
Measurement run_experiment(const Index& index, const std::map<std::string, std::uint64_t>& sizes,
                           const QuerySet& queries, int reps = 5);

Measurement failed_measurement(std::string scenario, std::string kind, const MethodConfig& config,
                               std::string error);

std::string to_json(const Measurement& m);
std::vector<Measurement> read_measurements(const std::string& path);
void write_measurements(const std::vector<Measurement>& ms, const std::string& path);

// Writes <scenario>.<kind>.dat files and summary.txt; returns the number of
// failed rows.
std::size_t emit_report(std::vector<Measurement> ms, const std::string& out_dir);

}  // namespace hrdc::bench
