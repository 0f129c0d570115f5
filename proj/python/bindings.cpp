#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "hrdc/bench.hpp"
#include "hrdc/error.hpp"
#include "hrdc/gap_codecs.hpp"
#include "hrdc/index.hpp"
#include "hrdc/text_store.hpp"

namespace py = pybind11;
using namespace hrdc;

namespace {

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
    return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
    const std::string_view s = b;
    return {s.begin(), s.end()};
}

CodecParams codec_params(unsigned rice_b, unsigned pfd_threshold) {
    CodecParams p;
    p.rice.b = rice_b;
    p.pfor.pfdThreshold = pfd_threshold;
    return p;
}

Corpus make_corpus(std::string text, std::vector<std::uint64_t> doc_starts) {
    Corpus c;
    c.text = std::move(text);
    c.doc_starts = std::move(doc_starts);
    return c;
}

}  // namespace

PYBIND11_MODULE(_hrdc, m) {
    m.doc() = "Compressed inverted indexes for repetitive collections";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    py::enum_<CodecId>(m, "Codec")
        .value("Vbyte", CodecId::Vbyte)
        .value("Rice", CodecId::Rice)
        .value("Simple9", CodecId::Simple9)
        .value("PforDelta", CodecId::PforDelta)
        .value("RiceRuns", CodecId::RiceRuns);

    py::enum_<Scenario>(m, "Scenario")
        .value("NonPositional", Scenario::NonPositional)
        .value("Positional", Scenario::Positional);

    m.def("to_gaps", [](std::vector<Value> v) { return to_gaps(v); }, py::arg("values"));
    m.def("from_gaps", [](std::vector<Value> g) { return from_gaps(g); }, py::arg("gaps"));
    m.def(
        "encode",
        [](std::vector<Value> gaps, CodecId codec, unsigned rice_b, unsigned pfd_threshold) {
            return to_bytes(encode(gaps, codec, codec_params(rice_b, pfd_threshold)));
        },
        py::arg("gaps"), py::arg("codec"), py::arg("rice_b") = 0, py::arg("pfd_threshold") = 100);
    m.def(
        "decode",
        [](const py::bytes& payload, CodecId codec, std::size_t n, unsigned rice_b, unsigned pfd_threshold) {
            return decode(from_bytes(payload), codec, n, codec_params(rice_b, pfd_threshold));
        },
        py::arg("payload"), py::arg("codec"), py::arg("n"), py::arg("rice_b") = 0, py::arg("pfd_threshold") = 100);
    m.def(
        "encode_stream",
        [](std::vector<Value> gaps, CodecId codec) {
            return to_bytes(encode_stream(gaps, codec, select_params(codec, gaps)));
        },
        py::arg("gaps"), py::arg("codec"));
    m.def("decode_stream", [](const py::bytes& s) { return decode_stream(from_bytes(s)); }, py::arg("stream"));
    m.def("rice_param", [](std::vector<Value> gaps) { return rice_param_select(gaps).b; }, py::arg("gaps"));

    m.def("method_names", &method_names);
    m.def(
        "gen_corpus",
        [](std::uint64_t seed, std::uint32_t base_docs, std::uint32_t versions, double mutation_rate,
           std::uint32_t tokens, std::uint32_t vocab_size, double zipf) {
            bench::CorpusSpec spec;
            spec.seed = seed;
            spec.base_docs = base_docs;
            spec.versions = versions;
            spec.mutation_rate = mutation_rate;
            spec.tokens = tokens;
            spec.vocab_size = vocab_size;
            spec.zipf = zipf;
            const Corpus c = bench::gen_corpus(spec);
            return py::make_tuple(py::bytes(c.text), c.doc_starts);
        },
        py::arg("seed") = 42, py::arg("base_docs") = 100, py::arg("versions") = 50, py::arg("mutation_rate") = 0.005,
        py::arg("tokens") = 2000, py::arg("vocab_size") = 20000, py::arg("zipf") = 0.8);

    py::class_<TextStore, std::shared_ptr<TextStore>>(m, "TextStore")
        .def_static(
            "compress",
            [](const py::bytes& text, std::uint32_t sample_ct) {
                const auto b = from_bytes(text);
                return std::make_shared<TextStore>(TextStore::compress(b, sample_ct));
            },
            py::arg("text"), py::arg("sample_ct") = 64)
        .def("extract", [](const TextStore& t, std::uint64_t a, std::uint64_t b) { return to_bytes(t.extract(a, b)); })
        .def("resampled",
             [](const TextStore& t, std::uint32_t ct) { return std::make_shared<TextStore>(t.resampled(ct)); })
        .def("serialized_size",
             [](const TextStore& t) {
                 ByteWriter w;
                 t.serialize(w);
                 return w.size();
             })
        .def_property_readonly("length", &TextStore::length)
        .def_property_readonly("sample_ct", &TextStore::sample_ct)
        .def_property_readonly("rule_count", &TextStore::rule_count);

    py::class_<Index>(m, "Index")
        .def_static(
            "build",
            [](const py::bytes& text, std::vector<std::uint64_t> doc_starts, Scenario scenario,
               const std::string& method, const std::map<std::string, std::string>& params, std::uint32_t sample_ct) {
                const Corpus c = make_corpus(std::string(text), std::move(doc_starts));
                return Index::build(c, scenario, method_config(method, params, scenario), sample_ct);
            },
            py::arg("text"), py::arg("doc_starts"), py::arg("scenario"), py::arg("method") = "Vbyte",
            py::arg("params") = std::map<std::string, std::string>{}, py::arg("sample_ct") = 64)
        .def_static("load", &Index::load, py::arg("dir"))
        .def("save", &Index::save, py::arg("dir"))
        .def_property_readonly("scenario", &Index::scenario)
        .def_property_readonly("method", [](const Index& ix) { return ix.postings().config().label(); })
        .def_property_readonly("vocabulary_size", [](const Index& ix) { return ix.vocab().size(); })
        .def(
            "documents",
            [](const Index& ix, std::string_view pattern) {
                const auto ids = ix.parse_query(pattern);
                return ids ? ix.locate_and(*ids) : std::vector<Value>{};
            },
            py::arg("pattern"))
        .def(
            "phrase",
            [](const Index& ix, std::string_view pattern) {
                std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
                if (const auto ids = ix.parse_query(pattern))
                    for (const auto& o : ix.locate_phrase(*ids)) out.emplace_back(o.doc, o.offset);
                return out;
            },
            py::arg("pattern"))
        .def(
            "extract", [](const Index& ix, std::uint64_t a, std::uint64_t b) { return to_bytes(ix.extract(a, b)); },
            py::arg("start"), py::arg("end"));
}
