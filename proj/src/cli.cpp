#include "villa/cli.hpp"

#include <charconv>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "villa/config.hpp"
#include "villa/errors.hpp"
#include "villa/experiment.hpp"
#include "villa/ingest.hpp"
#include "villa/manifest.hpp"
#include "villa/review_server.hpp"

namespace villa {
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidParameters(fmt::format("{}: '{}' is not a non-negative integer", what, text));
  }
  return v;
}

std::vector<std::size_t> parse_size_list(std::string_view text, std::string_view what) {
  std::vector<std::size_t> out;
  for (const auto& part : split(text, ',')) {
    if (!part.empty()) out.push_back(parse_size(part, what));
  }
  if (out.empty()) throw InvalidParameters(fmt::format("{} is empty", what));
  return out;
}

struct Workspace {
  fs::path root;

  fs::path corpus() const { return root / "corpus" / "corpus.jsonl"; }
  fs::path ground_truth() const { return root / "corpus" / "ground_truth.csv"; }
  fs::path abstracts_store() const { return root / "stores" / "abstracts.vstore"; }
  fs::path chunks_store() const { return root / "stores" / "fulltext.vstore"; }
  fs::path embedder_info() const { return root / "stores" / "embedder.json"; }
  fs::path runs() const { return root / "runs"; }
  fs::path results() const { return root / "results"; }
};

/// Registers one flag per config key on `cmd`; given flags land in `values`.
void add_config_flags(CLI::App* cmd, ConfigValues& values) {
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static constexpr Flag kFlags[] = {
      {"--k", "k", "single-stage top-k"},
      {"--t", "t", "single-stage distance threshold"},
      {"--k-a", "k_a", "publications selected at the first level"},
      {"--t-a", "t_a", "first-level distance threshold"},
      {"--k-c", "k_c", "chunks per publication at the second level"},
      {"--t-c", "t_c", "second-level distance threshold"},
      {"--chunk-size", "chunk_size", "full-text chunk size in characters"},
      {"--chunk-overlap", "chunk_overlap", "overlap between chunks in characters"},
      {"--abstract-size", "abstract_size", "abstract length that triggers a warning"},
      {"--iterations", "iterations", "repetitions per protein"},
      {"--virus", "virus", "virus name used in prompts"},
      {"--query-mode", "query_mode", "retrieval query text: prompt | short"},
      {"--jobs", "jobs", "parallelism bound"},
      {"--embedder", "embedder", "embedder spec"},
      {"--responder", "responder", "responder spec"},
      {"--std", "std", "dispersion: population | sample"},
  };
  for (const auto& f : kFlags) {
    cmd->add_option_function<std::string>(
        f.name, [&values, key = std::string(f.key)](const std::string& v) { values[key] = v; },
        f.help);
  }
}

struct Common {
  std::string workspace = ".";
  std::optional<std::string> config_path;
  ConfigValues overrides;

  Config config() const {
    return load_config(config_path ? std::optional<fs::path>(*config_path) : std::nullopt,
                       overrides);
  }
  Workspace ws() const { return Workspace{workspace}; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-w,--workspace", c.workspace, "workspace root")->capture_default_str();
  cmd->add_option_function<std::string>(
      "-c,--config", [&c](const std::string& p) { c.config_path = p; }, "config file");
  add_config_flags(cmd, c.overrides);
}

GroundTruthDataset load_gt_for(const Workspace& ws, const std::optional<std::string>& path,
                               std::ostream& err) {
  const fs::path p = path ? fs::path(*path) : ws.ground_truth();
  auto load = load_ground_truth(p);
  for (const auto& w : load.warnings) fmt::print(err, "warning: {}\n", w);
  return std::move(load.dataset);
}

std::unique_ptr<Embedder> stored_embedder(const Workspace& ws, std::size_t jobs) {
  std::ifstream in(ws.embedder_info());
  if (!in) {
    throw Error(fmt::format("'{}' not found; run `villa embed` first", ws.embedder_info().string()));
  }
  const auto info = nlohmann::json::parse(in);
  return make_embedder(info.at("spec").get<std::string>(), jobs);
}

// --- subcommands -----------------------------------------------------------

void cmd_ingest(const Common& c, const std::string& corpus_path, const std::string& gt_path,
                std::ostream& out, std::ostream& err) {
  const auto ws = c.ws();
  const Corpus corpus = load_corpus(corpus_path);
  const auto gt = load_ground_truth(gt_path, pub_id_set(corpus));
  for (const auto& w : gt.warnings) fmt::print(err, "warning: {}\n", w);

  fs::create_directories(ws.corpus().parent_path());
  write_corpus(ws.corpus(), corpus);
  fs::copy_file(gt_path, ws.ground_truth(), fs::copy_options::overwrite_existing);

  std::size_t mutations = 0;
  for (const auto& [_, truth] : gt.dataset.proteins) mutations += truth.mutations.size();
  fmt::print(out, "publications: {}, proteins: {}, mutations: {}\n", corpus.size(),
             gt.dataset.proteins.size(), mutations);
}

void cmd_embed(const Common& c, std::ostream& out, std::ostream& err) {
  const auto ws = c.ws();
  const Config cfg = c.config();
  const Corpus corpus = load_corpus(ws.corpus());
  const auto embedder = make_embedder(cfg.embedder, cfg.jobs);

  auto built = build_stores(corpus, *embedder,
                            {cfg.chunk_size, cfg.chunk_overlap, cfg.abstract_size});
  for (const auto& w : built.warnings) fmt::print(err, "warning: {}\n", w);

  fs::create_directories(ws.abstracts_store().parent_path());
  built.abstracts.save(ws.abstracts_store());
  built.chunks.save(ws.chunks_store());
  std::ofstream info(ws.embedder_info(), std::ios::trunc);
  info << nlohmann::json{{"spec", cfg.embedder},
                         {"descriptor", embedder->descriptor()},
                         {"chunk_size", cfg.chunk_size},
                         {"chunk_overlap", cfg.chunk_overlap}}
              .dump(2)
       << '\n';
  fmt::print(out, "abstracts: {}, chunks: {}\n", built.abstracts.size(), built.chunks.size());
}

struct RunOptions {
  std::string method;
  std::string proteins;
  std::string out;
  std::optional<std::string> ground_truth;
  std::optional<std::string> zero_shot_template;
  std::optional<std::string> rag_template;
  bool fixed_clock = false;
};

void cmd_run(const Common& c, const RunOptions& o, std::ostream& out, std::ostream& err) {
  const auto ws = c.ws();
  const Config cfg = c.config();
  const Method method = parse_method(o.method);
  const GroundTruthDataset gt = load_gt_for(ws, o.ground_truth, err);

  std::vector<std::string> proteins =
      o.proteins.empty() ? gt.protein_names() : split(o.proteins, ',');
  const auto responder = make_responder(cfg.responder, &gt);
  const auto zs_tpl = o.zero_shot_template ? PromptTemplate::load(*o.zero_shot_template)
                                           : PromptTemplate::default_zero_shot();
  const auto rag_tpl =
      o.rag_template ? PromptTemplate::load(*o.rag_template) : PromptTemplate::default_rag();

  std::unique_ptr<Embedder> embedder;
  std::optional<VectorStore> abstracts;
  std::optional<VectorStore> chunks;
  if (method != Method::ZeroShot) {
    embedder = stored_embedder(ws, cfg.jobs);
    abstracts = VectorStore::open(ws.abstracts_store());
    chunks = VectorStore::open(ws.chunks_store());
  } else {
    embedder = make_embedder("mock", 1);  // unused by zero-shot
  }
  const Stores stores{abstracts ? &*abstracts : nullptr, chunks ? &*chunks : nullptr};

  const bool fixed = o.fixed_clock || !env_or("VILLA_FIXED_CLOCK").empty();
  const Clock clock = fixed ? fixed_clock() : system_clock();

  RunManifest m;
  m.method = method;
  m.virus = cfg.virus;
  m.config = cfg.retrieval;
  m.query_mode = cfg.query_mode;
  m.template_id = method == Method::ZeroShot ? zs_tpl.id() : rag_tpl.id();
  if (method != Method::ZeroShot) m.embedder = embedder->descriptor();
  m.responder = responder->descriptor();
  m.started_at = clock();
  const QueryOptions query{cfg.query_mode, cfg.jobs};
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (const auto& protein : proteins) {
      RunRecord rec;
      rec.protein = protein;
      rec.iteration = it;
      rec.started_at = clock();
      rec.result = run_method(method, *embedder, *responder, stores, cfg.retrieval, zs_tpl, rag_tpl,
                              cfg.virus, protein, query);
      rec.finished_at = clock();
      fmt::print(out, "{} iteration {}: {} mutations\n", protein, it, rec.result.mutations.size());
      m.runs.push_back(std::move(rec));
    }
  }
  m.finished_at = clock();

  const fs::path path = o.out.empty() ? ws.runs() / fmt::format("{}.json", o.method) : fs::path(o.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_manifest(path, m);
  fmt::print(out, "manifest: {}\n", path.string());
}

struct EvaluateOptions {
  std::vector<std::string> manifests;
  std::optional<std::string> ground_truth;
};

void cmd_evaluate(const Common& c, const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  const auto ws = c.ws();
  const Config cfg = c.config();
  const GroundTruthDataset gt = load_gt_for(ws, o.ground_truth, err);

  std::vector<fs::path> paths(o.manifests.begin(), o.manifests.end());
  if (paths.empty()) {
    if (!fs::exists(ws.runs())) throw Error(fmt::format("no manifests in '{}'", ws.runs().string()));
    for (const auto& entry : fs::directory_iterator(ws.runs())) {
      if (entry.path().extension() == ".json") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
  }
  if (paths.empty()) throw Error("no run manifests to evaluate");

  std::vector<ScoreCell> cells;
  std::map<std::string, MethodLabel> labels;
  for (const auto& p : paths) {
    const auto m = load_manifest(p);
    auto scored = score_manifest(m, gt);
    cells.insert(cells.end(), scored.begin(), scored.end());
    const std::string responder = m.responder.contains("model")
                                      ? m.responder["model"].get<std::string>()
                                      : m.responder.value("kind", std::string("unknown"));
    labels[std::string(to_string(m.method))] = {responder, datastore_label(m.method)};
  }
  const auto summary = aggregate(cells, cfg.std_kind);

  fs::create_directories(ws.results());
  {
    std::ofstream csv_out(ws.results() / "results.csv", std::ios::trunc);
    write_results_csv(csv_out, summary.cells);
  }
  {
    std::ofstream json_out(ws.results() / "summary.json", std::ios::trunc);
    json_out << summary_json(summary, labels).dump(2) << '\n';
  }
  for (const auto& [method, ms] : summary.methods) {
    const auto& s = ms.scopes.at(MetricScope::Overall);
    fmt::print(out, "{}: F1 {:.2f}±{:.2f}  P {:.2f}±{:.2f}  R {:.2f}±{:.2f}  (n={})\n", method,
               s.f1.mean, s.f1.std, s.precision.mean, s.precision.std, s.recall.mean,
               s.recall.std, s.n);
  }
}

struct SweepOptions {
  std::string k_a_values = "5,10,20,40,80,160";
  std::string k_c_values = "160";
  std::string proteins;
  std::optional<std::string> ground_truth;
  std::optional<std::string> rag_template;
};

void cmd_sweep(const Common& c, const SweepOptions& o, std::ostream& out, std::ostream& err) {
  const auto ws = c.ws();
  const Config cfg = c.config();
  const GroundTruthDataset gt = load_gt_for(ws, o.ground_truth, err);
  const auto embedder = stored_embedder(ws, cfg.jobs);
  const auto responder = make_responder(cfg.responder, &gt);
  const auto abstracts = VectorStore::open(ws.abstracts_store());
  const auto chunks = VectorStore::open(ws.chunks_store());
  const auto tpl =
      o.rag_template ? PromptTemplate::load(*o.rag_template) : PromptTemplate::default_rag();

  SweepSetup setup;
  setup.embedder = embedder.get();
  setup.responder = responder.get();
  setup.abstracts = &abstracts;
  setup.chunks = &chunks;
  setup.gt = &gt;
  setup.base = cfg.retrieval;
  setup.tpl = &tpl;
  setup.virus = cfg.virus;
  setup.proteins = o.proteins.empty() ? gt.protein_names() : split(o.proteins, ',');
  setup.iterations = cfg.iterations;
  setup.query = {cfg.query_mode, 1};
  setup.jobs = cfg.jobs;
  setup.std_kind = cfg.std_kind;

  const auto rows = sweep({parse_size_list(o.k_a_values, "--k-a-values"),
                           parse_size_list(o.k_c_values, "--k-c-values")},
                          setup);
  fs::create_directories(ws.results());
  std::ofstream csv_out(ws.results() / "sweep.csv", std::ios::trunc);
  write_sweep_csv(csv_out, rows);
  for (const auto& row : rows) {
    if (!row.summary) {
      fmt::print(out, "k_a={} k_c={}: error: {}\n", row.k_a, row.k_c, row.error);
      continue;
    }
    const auto& s = row.summary->methods.begin()->second.scopes.at(MetricScope::Overall);
    fmt::print(out, "k_a={} k_c={}: F1 {:.3f} P {:.3f} R {:.3f}\n", row.k_a, row.k_c, s.f1.mean,
               s.precision.mean, s.recall.mean);
  }
}

struct ServeOptions {
  std::string data = "review-data";
  std::string tokens;
  std::vector<std::string> manifests;
  std::string host = "127.0.0.1";
  int port = 8080;
};

ReviewServer* g_server = nullptr;

void cmd_serve(const ServeOptions& o, std::ostream& out) {
  ReviewStore store(o.data);
  for (const auto& m : o.manifests) {
    const auto ids = store.ingest(load_manifest(m));
    fmt::print(out, "ingested {} items from {}\n", ids.size(), m);
  }
  ReviewServer server(store, load_tokens(o.tokens));
  if (!server.bind(o.host, o.port)) {
    throw Error(fmt::format("cannot bind {}:{}", o.host, o.port));
  }
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  fmt::print(out, "review service listening on http://{}:{}\n", o.host, o.port);
  out.flush();
  server.listen_after_bind();
  g_server = nullptr;
}

struct DistanceOptions {
  std::optional<std::string> ground_truth;
  std::optional<std::string> rag_template;
};

void cmd_analyze_distances(const Common& c, const DistanceOptions& o, std::ostream& out,
                           std::ostream& err) {
  const auto ws = c.ws();
  const Config cfg = c.config();
  const GroundTruthDataset gt = load_gt_for(ws, o.ground_truth, err);
  const auto embedder = stored_embedder(ws, cfg.jobs);
  const auto abstracts = VectorStore::open(ws.abstracts_store());
  const auto tpl =
      o.rag_template ? PromptTemplate::load(*o.rag_template) : PromptTemplate::default_rag();

  std::map<std::string, std::string> prompts;
  for (const auto& protein : gt.protein_names()) {
    prompts[protein] = retrieval_query(tpl, cfg.virus, protein, cfg.query_mode);
  }
  const auto report = abstract_distance_analysis(*embedder, gt, abstracts, prompts);
  for (const auto& w : report.warnings) fmt::print(err, "warning: {}\n", w);
  fs::create_directories(ws.results());
  std::ofstream json_out(ws.results() / "distances.json", std::ios::trunc);
  json_out << to_json(report).dump(2) << '\n';
  for (const auto& a : report.proteins) {
    fmt::print(out, "{}: relevant {:.4f} (n={}) vs other {:.4f} (n={}), U={}, p={:.3g}\n",
               a.protein, a.mean_relevant, a.relevant.size(), a.mean_non_relevant,
               a.non_relevant.size(), a.test.u_a, a.test.p_two_sided);
  }
}

void print_cause_chain(std::ostream& err, const std::exception& e, int depth = 0) {
  fmt::print(err, "{}{}\n", depth == 0 ? "error: " : "  caused by: ", e.what());
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    print_cause_chain(err, inner, depth + 1);
  }
}

}  // namespace

std::unique_ptr<Embedder> make_embedder(std::string_view spec, std::size_t jobs) {
  const auto parts = split(spec, ':');
  std::unique_ptr<Embedder> e;
  if (parts[0] == "mock") {
    if (parts.size() == 1) {
      e = std::make_unique<MockEmbedder>(7, 256);
    } else if (parts.size() == 3) {
      e = std::make_unique<MockEmbedder>(parse_size(parts[1], "mock seed"),
                                         parse_size(parts[2], "mock dim"));
    }
  } else if (parts[0] == "remote" && parts.size() == 3) {
    RemoteEmbedderConfig cfg;
    cfg.endpoint.base_url = env_or("EMBEDDER_BASE_URL");
    if (cfg.endpoint.base_url.empty()) {
      throw InvalidParameters("remote embedder needs EMBEDDER_BASE_URL");
    }
    cfg.endpoint.api_key = env_or("EMBEDDER_API_KEY");
    cfg.model = parts[1];
    cfg.query_model = env_or("EMBEDDER_QUERY_MODEL");
    cfg.dim = parse_size(parts[2], "remote dim");
    auto remote = std::make_unique<RemoteEmbedder>(std::move(cfg));
    if (const auto limit = env_or("EMBEDDER_MAX_CHARS"); !limit.empty()) {
      remote->set_max_input_chars(parse_size(limit, "EMBEDDER_MAX_CHARS"));
    }
    e = std::move(remote);
  }
  if (!e) {
    throw InvalidParameters(fmt::format(
        "bad embedder spec '{}' (expected mock, mock:<seed>:<dim> or remote:<model>:<dim>)", spec));
  }
  e->set_parallelism(jobs);
  return e;
}

std::unique_ptr<Responder> make_responder(std::string_view spec, const GroundTruthDataset* gt) {
  if (spec == "mock:oracle") {
    if (gt == nullptr) throw InvalidParameters("the oracle responder needs a ground truth");
    return std::make_unique<OracleResponder>(*gt);
  }
  if (spec == "mock:empty") {
    return ScriptedResponder::constant(R"({"mutations": [], "reasoning": "No mutations reported."})",
                                       "empty");
  }
  if (spec.starts_with("remote:") && spec.size() > 7) {
    RemoteResponderConfig cfg;
    cfg.endpoint.base_url = env_or("RESPONDER_BASE_URL");
    if (cfg.endpoint.base_url.empty()) {
      throw InvalidParameters("remote responder needs RESPONDER_BASE_URL");
    }
    cfg.endpoint.api_key = env_or("RESPONDER_API_KEY");
    cfg.model = std::string(spec.substr(7));
    return std::make_unique<RemoteResponder>(std::move(cfg));
  }
  throw InvalidParameters(fmt::format(
      "bad responder spec '{}' (expected mock:oracle, mock:empty or remote:<model>)", spec));
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-level retrieval-augmented mutation extraction"};
  app.require_subcommand(1);

  Common common;
  std::string corpus_path;
  std::string gt_path;
  RunOptions run_opts;
  EvaluateOptions eval_opts;
  SweepOptions sweep_opts;
  ServeOptions serve_opts;
  DistanceOptions dist_opts;

  auto* ingest = app.add_subcommand("ingest", "validate corpus and ground truth into a workspace");
  add_common(ingest, common);
  ingest->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  ingest->add_option("--ground-truth", gt_path, "ground-truth CSV")->required();

  auto* embed = app.add_subcommand("embed", "build the abstract and full-text stores");
  add_common(embed, common);

  auto* run = app.add_subcommand("run", "run an extraction method and write a manifest");
  add_common(run, common);
  run->add_option("-m,--method", run_opts.method, "zero-shot | rag-abstracts | rag-fulltext | villa")
      ->required();
  run->add_option("--proteins", run_opts.proteins, "comma-separated proteins (default: all)");
  run->add_option("-o,--out", run_opts.out, "manifest path (default: runs/<method>.json)");
  run->add_option_function<std::string>(
      "--ground-truth", [&](const std::string& v) { run_opts.ground_truth = v; }, "ground-truth CSV");
  run->add_option_function<std::string>(
      "--zero-shot-template", [&](const std::string& v) { run_opts.zero_shot_template = v; },
      "zero-shot template JSON");
  run->add_option_function<std::string>(
      "--rag-template", [&](const std::string& v) { run_opts.rag_template = v; },
      "RAG template JSON");
  run->add_flag("--fixed-clock", run_opts.fixed_clock, "write a constant timestamp");

  auto* evaluate = app.add_subcommand("evaluate", "score manifests against the ground truth");
  add_common(evaluate, common);
  evaluate->add_option("--manifest", eval_opts.manifests, "manifest (repeatable; default: runs/*.json)");
  evaluate->add_option_function<std::string>(
      "--ground-truth", [&](const std::string& v) { eval_opts.ground_truth = v; }, "ground-truth CSV");

  auto* sweep_cmd = app.add_subcommand("sweep", "grid over k_a and k_c for the two-level method");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--k-a-values", sweep_opts.k_a_values, "comma-separated k_a values")
      ->capture_default_str();
  sweep_cmd->add_option("--k-c-values", sweep_opts.k_c_values, "comma-separated k_c values")
      ->capture_default_str();
  sweep_cmd->add_option("--proteins", sweep_opts.proteins, "comma-separated proteins");
  sweep_cmd->add_option_function<std::string>(
      "--ground-truth", [&](const std::string& v) { sweep_opts.ground_truth = v; }, "ground-truth CSV");
  sweep_cmd->add_option_function<std::string>(
      "--rag-template", [&](const std::string& v) { sweep_opts.rag_template = v; },
      "RAG template JSON");

  auto* serve = app.add_subcommand("serve", "start the review service");
  serve->add_option("--data", serve_opts.data, "review data directory")->capture_default_str();
  serve->add_option("--tokens", serve_opts.tokens, "token table JSON")->required();
  serve->add_option("--manifest", serve_opts.manifests, "manifest to ingest (repeatable)");
  serve->add_option("--host", serve_opts.host)->capture_default_str();
  serve->add_option("--port", serve_opts.port)->capture_default_str();

  auto* distances = app.add_subcommand("analyze-distances",
                                       "compare prompt distances of relevant and other abstracts");
  add_common(distances, common);
  distances->add_option_function<std::string>(
      "--ground-truth", [&](const std::string& v) { dist_opts.ground_truth = v; }, "ground-truth CSV");
  distances->add_option_function<std::string>(
      "--rag-template", [&](const std::string& v) { dist_opts.rag_template = v; },
      "RAG template JSON");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    out.flush();
    err << app.help();
    return 2;
  }

  try {
    if (*ingest) cmd_ingest(common, corpus_path, gt_path, out, err);
    else if (*embed) cmd_embed(common, out, err);
    else if (*run) cmd_run(common, run_opts, out, err);
    else if (*evaluate) cmd_evaluate(common, eval_opts, out, err);
    else if (*sweep_cmd) cmd_sweep(common, sweep_opts, out, err);
    else if (*serve) cmd_serve(serve_opts, out);
    else if (*distances) cmd_analyze_distances(common, dist_opts, out, err);
  } catch (const std::exception& e) {
    print_cause_chain(err, e);
    return 1;
  }
  return 0;
}

}  // namespace villa
