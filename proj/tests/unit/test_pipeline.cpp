#include <doctest.h>

#include <atomic>
#include <map>

#include <json.hpp>

#include "fixture.hpp"
#include "stub_server.hpp"
#include "tempdir.hpp"
#include "villa/errors.hpp"
#include "villa/ingest.hpp"
#include "villa/pipeline.hpp"
#include "villa/response_parser.hpp"

using namespace villa;
using nlohmann::json;

namespace {

std::unique_ptr<ScriptedResponder> answer(const std::string& raw) {
  return ScriptedResponder::constant(raw);
}

struct Fx {
  Corpus corpus = villa::testing::fixture_corpus();
  GroundTruthDataset gt = villa::testing::fixture_ground_truth();
  MockEmbedder embedder{7, 256};
  BuiltStores stores = build_stores(corpus, embedder, villa::testing::fixture_store_options());
  PromptTemplate tpl = PromptTemplate::default_rag();
  QueryOptions query{QueryMode::Short, 1};
};

RetrievalConfig wide() {
  RetrievalConfig c;
  c.k = 150;
  c.t = 2.0;
  c.k_a = 160;
  c.t_a = 2.0;
  c.k_c = 160;
  c.t_c = 2.0;
  return c;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("prompt rendering") {
  const auto zs = PromptTemplate::default_zero_shot();
  const auto text = zs.render("influenza A", "PB2");
  CHECK(text.find("influenza A") != std::string::npos);
  CHECK(text.find("PB2") != std::string::npos);
  CHECK(text.find("{virus}") == std::string::npos);
  CHECK(text.find("{protein}") == std::string::npos);
  CHECK(text.find("JSON") != std::string::npos);

  const auto rag = PromptTemplate::default_rag();
  const Context empty;
  const auto rendered = rag.render("influenza A", "HA", &empty);
  CHECK(rendered.find("{context}") == std::string::npos);
  CHECK(rendered.find("only within the contextual information") != std::string::npos);
  CHECK_THROWS_AS(rag.render("v", "p"), TemplateError);
  CHECK_THROWS_AS(zs.render("v", "p", &empty), TemplateError);
}

TEST_CASE("template validation") {
  CHECK_THROWS_AS(PromptTemplate("t", "no context for {protein}", PromptMode::Rag), TemplateError);
  CHECK_THROWS_AS(PromptTemplate("t", "{context} twice {context}", PromptMode::Rag), TemplateError);
  CHECK_THROWS_AS(PromptTemplate("t", "{context}", PromptMode::ZeroShot), TemplateError);
  CHECK_THROWS_AS(PromptTemplate("t", "{organism}", PromptMode::ZeroShot), TemplateError);
  CHECK_THROWS_AS(PromptTemplate("t", "open {virus", PromptMode::ZeroShot), TemplateError);
  CHECK_THROWS_AS(PromptTemplate("t", "close }", PromptMode::ZeroShot), TemplateError);
  const PromptTemplate braces("t", "{{\"a\": \"{virus}\"}}", PromptMode::ZeroShot);
  CHECK(braces.render("flu", "HA") == "{\"a\": \"flu\"}");
}

TEST_CASE("template files") {
  villa::testing::TempDir tmp;
  const auto p = tmp.write("t.json", json{{"template_id", "mine"}, {"mode", "rag"},
                                          {"body", "{virus}/{protein}: {context}"}}
                                         .dump());
  const auto tpl = PromptTemplate::load(p);
  CHECK(tpl.id() == "mine");
  CHECK(tpl.mode() == PromptMode::Rag);
  CHECK_THROWS_AS(PromptTemplate::load(tmp.write("bad.json", R"({"template_id":"x"})")), Error);
}

TEST_CASE("context ordering and rendering") {
  std::vector<ScoredEntry> entries(3);
  entries[0].entry.entry_id = "B#c000000";
  entries[0].entry.pub_id = "B";
  entries[0].entry.text = "bbb";
  entries[0].distance = 0.3;
  entries[1].entry.entry_id = "A#c000001";
  entries[1].entry.pub_id = "A";
  entries[1].entry.text = "aaa";
  entries[1].distance = 0.1;
  entries[2].entry.entry_id = "A#c000000";
  entries[2].entry.pub_id = "A";
  entries[2].entry.text = "ccc";
  entries[2].distance = 0.3;
  const auto ctx = Context::from_entries(entries);
  REQUIRE(ctx.pieces.size() == 3);
  CHECK(ctx.pieces[0].entry_id == "A#c000001");
  CHECK(ctx.pieces[1].entry_id == "A#c000000");
  CHECK(ctx.rendered == "[A]\naaa\n\n---\n\n[A]\nccc\n\n---\n\n[B]\nbbb");
  CHECK(ctx.pub_ids() == std::vector<std::string>{"A", "B"});
}

TEST_CASE("parse_response") {
  auto r = parse_response(R"({"mutations":["A123C","a7c"],"reasoning":"r"})");
  CHECK(canonical_keys(r.mutations) == std::set<std::string>{"A123C", "A7C"});
  CHECK(r.reasoning == "r");
  CHECK(r.rejects.empty());

  r = parse_response(R"({"mutations":["Δ123"],"reasoning":"r"})");
  CHECK(r.mutations.empty());
  CHECK(r.rejects == std::vector<std::string>{"Δ123"});

  r = parse_response("Here is my answer: ```json\n{\"mutations\": [\"E627K\"], \"reasoning\": "
                     "\"uses {braces} inside\"}\n```\nThanks.");
  CHECK(canonical_keys(r.mutations) == std::set<std::string>{"E627K"});
  CHECK(r.reasoning == "uses {braces} inside");

  // The first object lacks the schema; the second one is used.
  r = parse_response(R"(note {"x": 1} then {"reasoning": "ok", "mutations": ["D701N", 5]})");
  CHECK(canonical_keys(r.mutations) == std::set<std::string>{"D701N"});
  CHECK(r.rejects.size() == 1);

  CHECK_THROWS_AS(parse_response("no json here"), MalformedResponse);
  CHECK_THROWS_AS(parse_response(R"({"mutations": "E627K", "reasoning": "r"})"), MalformedResponse);
  CHECK_THROWS_AS(parse_response(R"({"mutations": [], "reasoning": "r")"), MalformedResponse);
}

TEST_CASE("zero-shot") {
  const auto zs = PromptTemplate::default_zero_shot();
  auto r = zero_shot(*answer(R"({"mutations": ["A123C"], "reasoning": "..."})"), zs, "flu", "HA");
  CHECK(r.method == Method::ZeroShot);
  CHECK(r.mutations.size() == 1);
  CHECK(r.context_pub_ids.empty());
  CHECK(r.error.empty());

  r = zero_shot(*answer(R"({"mutations": [], "reasoning": "none"})"), zs, "flu", "HA");
  CHECK(r.mutations.empty());
  CHECK(r.error.empty());

  r = zero_shot(*answer("I cannot answer."), zs, "flu", "HA");
  CHECK(r.mutations.empty());
  CHECK_FALSE(r.error.empty());
  CHECK(r.raw_response == "I cannot answer.");

  CHECK_THROWS_AS(zero_shot(*answer("{}"), PromptTemplate::default_rag(), "flu", "HA"), TemplateError);
}

TEST_CASE("rag-abstracts retrieves protein-named abstracts first") {
  Fx fx;
  OracleResponder oracle(fx.gt);
  auto cfg = wide();
  cfg.k = 2;
  for (const auto& protein : fx.gt.protein_names()) {
    // brute-force oracle over the stored vectors
    const auto q = fx.embedder.embed(retrieval_query(fx.tpl, "influenza A", protein, QueryMode::Short));
    std::vector<std::pair<double, std::string>> dist;
    for (const auto& e : fx.stores.abstracts.entries())
      dist.emplace_back(cosine_distance(q, e.vector), e.pub_id);
    std::sort(dist.begin(), dist.end());
    const auto relevant = fx.gt.proteins.at(protein).pub_ids;
    CHECK(relevant.count(dist[0].second) == 1);
    CHECK(relevant.count(dist[1].second) == 1);

    const auto r = rag_abstracts(fx.embedder, oracle, fx.stores.abstracts, cfg, fx.tpl,
                                 "influenza A", protein, fx.query);
    CHECK(r.context_pub_ids == relevant);
    CHECK(r.mutations.empty());  // abstracts carry no mutations
  }
}

TEST_CASE("rag with nothing within threshold still queries the responder") {
  Fx fx;
  auto counter = answer(R"({"mutations": [], "reasoning": "nothing"})");
  auto cfg = wide();
  cfg.t = 0.0;
  const auto r = rag_abstracts(fx.embedder, *counter, fx.stores.abstracts, cfg, fx.tpl,
                               "influenza A", "HA", fx.query);
  CHECK(counter->calls() == 1);
  CHECK(r.context.empty());
  CHECK(r.context_pub_ids.empty());
}

TEST_CASE("rag-fulltext context is sorted and bounded") {
  Fx fx;
  OracleResponder oracle(fx.gt);
  auto cfg = wide();
  cfg.k = 5;
  const auto r = rag_fulltext(fx.embedder, oracle, fx.stores.chunks, cfg, fx.tpl, "influenza A",
                              "NA", fx.query);
  REQUIRE(r.context.size() == 5);
  const auto q = fx.embedder.embed(retrieval_query(fx.tpl, "influenza A", "NA", QueryMode::Short));
  for (std::size_t i = 0; i < r.context.size(); ++i) {
    const auto entry = fx.stores.chunks.find(r.context[i].entry_id);
    REQUIRE(entry.has_value());
    CHECK(r.context[i].distance == doctest::Approx(cosine_distance(q, entry->vector)).epsilon(1e-12));
    if (i > 0) CHECK(r.context[i - 1].distance <= r.context[i].distance);
  }
  std::set<std::string> pubs;
  for (const auto& p : r.context) pubs.insert(p.pub_id);
  CHECK(r.context_pub_ids == pubs);

  cfg.k = 150;
  cfg.t = 0.6;
  const auto bounded = rag_fulltext(fx.embedder, oracle, fx.stores.chunks, cfg, fx.tpl,
                                    "influenza A", "NA", fx.query);
  for (const auto& p : bounded.context) CHECK(p.distance <= 0.6);
  CHECK(bounded.context.size() < fx.stores.chunks.size());
}

TEST_CASE("villa per-publication calls and union") {
  Fx fx;
  OracleResponder oracle(fx.gt);
  auto cfg = wide();
  cfg.k_a = 1;
  auto r = villa::villa(fx.embedder, oracle, fx.stores.abstracts, fx.stores.chunks, cfg, fx.tpl,
                        "influenza A", "PB2", fx.query);
  CHECK(oracle.calls() == 1);
  REQUIRE(r.per_publication.has_value());
  REQUIRE(r.per_publication->size() == 1);
  CHECK(r.mutations.size() == 2);

  cfg.k_a = 6;
  OracleResponder oracle6(fx.gt);
  r = villa::villa(fx.embedder, oracle6, fx.stores.abstracts, fx.stores.chunks, cfg, fx.tpl,
                   "influenza A", "PB2", {QueryMode::Short, 3});
  CHECK(oracle6.calls() == 6);
  CHECK(canonical_keys(r.mutations) == std::set<std::string>{"D701N", "E627K", "K526R", "T271A"});
  CHECK(r.context_pub_ids.size() == 6);
  // union of slots, slots in level-1 rank order
  MutationSet u;
  double prev = -1;
  for (const auto& slot : *r.per_publication) {
    u.insert(slot.mutations.begin(), slot.mutations.end());
    CHECK(slot.distance >= prev);
    prev = slot.distance;
    for (const auto& piece : slot.context) CHECK(piece.pub_id == slot.pub_id);
  }
  CHECK(u == r.mutations);
  CHECK(r.reasoning.find("[P5]") != std::string::npos);
}

TEST_CASE("villa: publication with no chunk within threshold") {
  Fx fx;
  OracleResponder oracle(fx.gt);
  auto cfg = wide();
  cfg.t_c = 0.0;
  const auto r = villa::villa(fx.embedder, oracle, fx.stores.abstracts, fx.stores.chunks, cfg,
                              fx.tpl, "influenza A", "HA", fx.query);
  CHECK(r.mutations.empty());
  for (const auto& slot : *r.per_publication) CHECK(slot.context.empty());
}

TEST_CASE("villa: a failing publication does not abort the run") {
  Fx fx;
  OracleResponder oracle(fx.gt);
  ScriptedResponder flaky([&](const ResponderRequest& req) -> std::string {
    if (req.context && req.context->rendered.find("[P1]") != std::string::npos) {
      throw TransportError("backend down", 503);
    }
    if (req.context && req.context->rendered.find("[P3]") != std::string::npos) return "garbage";
    return oracle.respond(req);
  });
  auto cfg = wide();
  const auto r = villa::villa(fx.embedder, flaky, fx.stores.abstracts, fx.stores.chunks, cfg,
                              fx.tpl, "influenza A", "HA", {QueryMode::Short, 4});
  std::map<std::string, std::string> errors;
  for (const auto& slot : *r.per_publication) errors[slot.pub_id] = slot.error;
  CHECK(errors.at("P1").find("backend down") != std::string::npos);
  CHECK_FALSE(errors.at("P3").empty());
  CHECK(errors.at("P2").empty());
  CHECK(canonical_keys(r.mutations) == std::set<std::string>{"D101N", "K60E"});
}

TEST_CASE("oracle output never leaves the context") {
  Fx fx;
  OracleResponder oracle(fx.gt);
  std::vector<std::string> contexts;
  std::mutex mu;
  ScriptedResponder spy([&](const ResponderRequest& req) {
    std::lock_guard lock(mu);
    contexts.push_back(req.context ? req.context->rendered : "");
    return oracle.respond(req);
  });
  auto cfg = wide();
  cfg.k = 3;
  cfg.k_c = 1;
  for (Method m : {Method::RagAbstracts, Method::RagFulltext, Method::Villa}) {
    for (const auto& protein : fx.gt.protein_names()) {
      contexts.clear();
      const auto r = run_method(m, fx.embedder, spy, {&fx.stores.abstracts, &fx.stores.chunks},
                                cfg, PromptTemplate::default_zero_shot(), fx.tpl, "influenza A",
                                protein, fx.query);
      std::string all;
      for (const auto& c : contexts) all += c + "\n";
      for (const auto& key : canonical_keys(r.mutations)) CHECK(all.find(key) != std::string::npos);
    }
  }
}

TEST_CASE("runs are deterministic") {
  Fx fx;
  OracleResponder oracle(fx.gt);
  auto cfg = wide();
  cfg.k_c = 2;
  const auto a = villa::villa(fx.embedder, oracle, fx.stores.abstracts, fx.stores.chunks, cfg,
                              fx.tpl, "influenza A", "NA", {QueryMode::Prompt, 4});
  const auto b = villa::villa(fx.embedder, oracle, fx.stores.abstracts, fx.stores.chunks, cfg,
                              fx.tpl, "influenza A", "NA", {QueryMode::Prompt, 1});
  CHECK(a == b);
}

TEST_CASE("enlarging k_a never shrinks the mutation set") {
  Fx fx;
  OracleResponder oracle(fx.gt);
  for (const auto& protein : fx.gt.protein_names()) {
    MutationSet prev;
    for (std::size_t k_a = 1; k_a <= 6; ++k_a) {
      auto cfg = wide();
      cfg.k_a = k_a;
      cfg.k_c = 1;
      const auto r = villa::villa(fx.embedder, oracle, fx.stores.abstracts, fx.stores.chunks, cfg,
                                  fx.tpl, "influenza A", protein, {QueryMode::Prompt, 2});
      CHECK(std::includes(r.mutations.begin(), r.mutations.end(), prev.begin(), prev.end()));
      prev = r.mutations;
    }
  }
}

TEST_CASE("retrieval config validation") {
  Fx fx;
  OracleResponder oracle(fx.gt);
  auto cfg = wide();
  cfg.k_c = 0;
  CHECK_THROWS_AS(villa::villa(fx.embedder, oracle, fx.stores.abstracts, fx.stores.chunks, cfg,
                               fx.tpl, "flu", "HA"),
                  InvalidParameters);
  cfg = wide();
  cfg.t = 2.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameters);
  MockEmbedder other(7, 32);
  CHECK_THROWS_AS(rag_abstracts(other, oracle, fx.stores.abstracts, wide(), fx.tpl, "flu", "HA"),
                  InvalidParameters);
  CHECK_THROWS_AS(run_method(Method::Villa, fx.embedder, oracle, {&fx.stores.abstracts, nullptr},
                             wide(), PromptTemplate::default_zero_shot(), fx.tpl, "flu", "HA"),
                  InvalidParameters);
}

TEST_CASE("names round trip") {
  for (Method m : {Method::ZeroShot, Method::RagAbstracts, Method::RagFulltext, Method::Villa}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(parse_query_mode("short") == QueryMode::Short);
  CHECK_THROWS_AS(parse_method("hybrid"), InvalidParameters);
  CHECK(retrieval_query(PromptTemplate::default_rag(), "influenza A", "PB2", QueryMode::Short) ==
        "mutations in PB2 of influenza A");
}

TEST_CASE("remote responder wire contract") {
  json seen;
  villa::testing::StubServer server("/chat/completions",
                                    [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    res.set_content(json{{"choices", {{{"message", {{"role", "assistant"},
                                                    {"content", R"({"mutations":["E627K"],"reasoning":"r"})"}}}}}}}
                        .dump(),
                    "application/json");
  });
  RemoteResponderConfig cfg;
  cfg.endpoint.base_url = server.base_url();
  cfg.model = "chat-model";
  cfg.seed = 42;
  RemoteResponder g(cfg);
  const auto r = zero_shot(g, PromptTemplate::default_zero_shot(), "influenza A", "PB2");
  CHECK(canonical_keys(r.mutations) == std::set<std::string>{"E627K"});
  CHECK(seen["model"] == "chat-model");
  CHECK(seen["temperature"] == 0.0);
  CHECK(seen["seed"] == 42);
  CHECK(seen["messages"].back()["role"] == "user");
  CHECK(seen["messages"].back()["content"].get<std::string>().find("PB2") != std::string::npos);

  villa::testing::StubServer broken("/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices": []})", "application/json");
  });
  cfg.endpoint.base_url = broken.base_url();
  CHECK_THROWS_AS(zero_shot(RemoteResponder(cfg), PromptTemplate::default_zero_shot(), "v", "p"),
                  ContractViolation);
}

}
