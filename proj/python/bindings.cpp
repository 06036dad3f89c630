#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "villa/cli.hpp"
#include "villa/config.hpp"
#include "villa/corpus.hpp"
#include "villa/embedding.hpp"
#include "villa/ingest.hpp"
#include "villa/mann_whitney.hpp"
#include "villa/manifest.hpp"
#include "villa/metrics.hpp"
#include "villa/mutation.hpp"
#include "villa/pipeline.hpp"
#include "villa/response_parser.hpp"
#include "villa/vectorstore.hpp"

namespace py = pybind11;
using namespace villa;

namespace {

EmbedRole role_of(bool query) { return query ? EmbedRole::Query : EmbedRole::Document; }

py::list hits_to_list(const std::vector<ScoredEntry>& hits) {
  py::list out;
  for (const auto& h : hits) {
    out.append(py::make_tuple(h.entry.entry_id, h.entry.pub_id, h.distance));
  }
  return out;
}

// Whole-pipeline helper: corpus and ground truth as text, config keys as
// strings. Returns the extraction result as JSON text.
std::string extract(const std::string& method, const std::string& corpus_jsonl,
                    const std::string& ground_truth_csv, const std::string& protein,
                    const ConfigValues& overrides) {
  const Config cfg = load_config(std::nullopt, overrides);
  const Corpus corpus = parse_corpus(corpus_jsonl);
  const auto gt = parse_ground_truth(ground_truth_csv, pub_id_set(corpus)).dataset;
  const auto embedder = make_embedder(cfg.embedder, cfg.jobs);
  const auto responder = make_responder(cfg.responder, &gt);
  const auto built = build_stores(corpus, *embedder,
                                  {cfg.chunk_size, cfg.chunk_overlap, cfg.abstract_size});
  const auto result = run_method(parse_method(method), *embedder, *responder,
                                 {&built.abstracts, &built.chunks}, cfg.retrieval,
                                 PromptTemplate::default_zero_shot(), PromptTemplate::default_rag(),
                                 cfg.virus, protein, {cfg.query_mode, cfg.jobs});
  return to_json(result).dump();
}

}  // namespace

PYBIND11_MODULE(_villa, m) {
  m.doc() = "Mutation extraction core: chunking, embedding, retrieval, metrics";

  py::register_exception<Error>(m, "VillaError", PyExc_ValueError);

  py::class_<Chunk>(m, "Chunk")
      .def_readonly("pub_id", &Chunk::pub_id)
      .def_readonly("chunk_index", &Chunk::chunk_index)
      .def_readonly("start_offset", &Chunk::start_offset)
      .def_readonly("text", &Chunk::text);
  m.def("chunk_text", &chunk_text, py::arg("text"), py::arg("size"), py::arg("overlap"),
        py::arg("pub_id") = "");

  py::class_<Mutation>(m, "Mutation")
      .def_readonly("original", &Mutation::original)
      .def_readonly("position", &Mutation::position)
      .def_readonly("changed", &Mutation::changed)
      .def("__str__", [](const Mutation& mu) { return normalize(mu); })
      .def("__repr__", [](const Mutation& mu) { return "Mutation('" + normalize(mu) + "')"; })
      .def("__eq__", [](const Mutation& a, const Mutation& b) { return a == b; })
      .def("__hash__", [](const Mutation& mu) { return py::hash(py::str(normalize(mu))); });
  m.def("parse_mutation", &parse_mutation, py::arg("text"));
  m.def("normalize", [](const std::string& text) { return normalize(parse_mutation(text)); },
        py::arg("text"));

  m.def("cosine_distance", [](const std::vector<float>& a, const std::vector<float>& b) {
    return cosine_distance(a, b);
  });

  py::class_<MockEmbedder>(m, "MockEmbedder")
      .def(py::init<std::uint64_t, std::size_t>(), py::arg("seed") = 7, py::arg("dim") = 256)
      .def_property_readonly("dim", &MockEmbedder::dim)
      .def_property_readonly("name", &MockEmbedder::name)
      .def("embed", [](const MockEmbedder& e, const std::string& text,
                       bool query) { return e.embed(text, role_of(query)); },
           py::arg("text"), py::arg("query") = false);

  py::class_<VectorStore>(m, "VectorStore")
      .def(py::init<std::size_t>(), py::arg("dim"))
      .def_property_readonly("dim", &VectorStore::dim)
      .def("__len__", &VectorStore::size)
      .def("add",
           [](VectorStore& s, const std::string& pub_id, std::vector<float> vector,
              const std::string& text, std::optional<std::uint32_t> chunk_index) {
             DatastoreEntry e;
             e.pub_id = pub_id;
             e.kind = chunk_index ? EntryKind::Chunk : EntryKind::Abstract;
             e.chunk_index = chunk_index.value_or(0);
             e.entry_id = make_entry_id(pub_id, e.kind, e.chunk_index);
             e.vector = std::move(vector);
             e.text = text;
             s.insert(std::move(e));
           },
           py::arg("pub_id"), py::arg("vector"), py::arg("text") = "",
           py::arg("chunk_index") = py::none(),
           "Adds an abstract entry, or a chunk entry when chunk_index is given.")
      .def("top_k",
           [](const VectorStore& s, const std::vector<float>& query, std::size_t k, double t,
              std::optional<std::string> pub_id) {
             return hits_to_list(s.top_k(query, k, t, {pub_id}));
           },
           py::arg("query"), py::arg("k"), py::arg("threshold"), py::arg("pub_id") = py::none(),
           "List of (entry_id, pub_id, distance), nearest first.")
      .def("save", [](const VectorStore& s, const std::string& path) { s.save(path); })
      .def_static("open", [](const std::string& path) { return VectorStore::open(path); });

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("precision", &Metrics::precision)
      .def_readonly("recall", &Metrics::recall)
      .def_readonly("f1", &Metrics::f1)
      .def_readonly("tp", &Metrics::tp)
      .def_readonly("fp", &Metrics::fp)
      .def_readonly("fn", &Metrics::fn);
  m.def("set_metrics", [](const std::set<std::string>& retrieved,
                          const std::set<std::string>& truth) { return set_metrics(retrieved, truth); },
        py::arg("retrieved"), py::arg("truth"));

  py::class_<MannWhitneyResult>(m, "MannWhitneyResult")
      .def_readonly("u_a", &MannWhitneyResult::u_a)
      .def_readonly("u_b", &MannWhitneyResult::u_b)
      .def_readonly("p", &MannWhitneyResult::p_two_sided)
      .def_readonly("exact", &MannWhitneyResult::exact);
  m.def("mann_whitney_u",
        [](const std::vector<double>& a, const std::vector<double>& b, std::size_t exact_max,
           bool continuity) {
          return mann_whitney_u(a, b, MannWhitneyOptions{exact_max, continuity});
        },
        py::arg("a"), py::arg("b"), py::arg("exact_max") = 8, py::arg("continuity") = true);

  m.def("parse_response",
        [](const std::string& raw) {
          auto parsed = parse_response(raw);
          return py::make_tuple(canonical_keys(parsed.mutations), parsed.reasoning, parsed.rejects);
        },
        py::arg("raw"), "(mutation keys, reasoning, rejected items)");

  m.def("_extract", &extract, py::arg("method"), py::arg("corpus_jsonl"),
        py::arg("ground_truth_csv"), py::arg("protein"), py::arg("config") = ConfigValues{});

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs one CLI invocation in-process; returns (code, stdout, stderr).");
}
