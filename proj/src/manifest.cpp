#include "villa/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "villa/errors.hpp"

namespace villa {
namespace {

using nlohmann::json;

json mutation_list(const MutationSet& set) {
  json arr = json::array();
  for (const auto& m : set) arr.push_back(normalize(m));
  return arr;
}

MutationSet mutation_set(const json& arr) {
  MutationSet out;
  for (const auto& item : arr) out.insert(parse_mutation(item.get<std::string>()));
  return out;
}

json pieces_json(const std::vector<RetrievedPiece>& pieces) {
  json arr = json::array();
  for (const auto& p : pieces) {
    arr.push_back({{"entry_id", p.entry_id}, {"pub_id", p.pub_id}, {"distance", p.distance}});
  }
  return arr;
}

std::vector<RetrievedPiece> pieces_from(const json& arr) {
  std::vector<RetrievedPiece> out;
  for (const auto& p : arr) {
    out.push_back({p.at("entry_id").get<std::string>(), p.at("pub_id").get<std::string>(),
                   p.at("distance").get<double>()});
  }
  return out;
}

json config_json(const RetrievalConfig& c) {
  return {{"k", c.k}, {"t", c.t}, {"k_a", c.k_a}, {"t_a", c.t_a}, {"k_c", c.k_c}, {"t_c", c.t_c}};
}

RetrievalConfig config_from(const json& j) {
  RetrievalConfig c;
  c.k = j.at("k").get<std::size_t>();
  c.t = j.at("t").get<double>();
  c.k_a = j.at("k_a").get<std::size_t>();
  c.t_a = j.at("t_a").get<double>();
  c.k_c = j.at("k_c").get<std::size_t>();
  c.t_c = j.at("t_c").get<double>();
  return c;
}

}  // namespace

json to_json(const ExtractionResult& r) {
  json j = {{"protein", r.protein},
            {"method", std::string(to_string(r.method))},
            {"mutations", mutation_list(r.mutations)},
            {"reasoning", r.reasoning},
            {"raw_response", r.raw_response},
            {"rejects", r.rejects},
            {"context_pub_ids", r.context_pub_ids},
            {"context", pieces_json(r.context)},
            {"error", r.error}};
  if (r.per_publication) {
    json per = json::array();
    for (const auto& p : *r.per_publication) {
      per.push_back({{"pub_id", p.pub_id},
                     {"distance", p.distance},
                     {"mutations", mutation_list(p.mutations)},
                     {"reasoning", p.reasoning},
                     {"raw_response", p.raw_response},
                     {"rejects", p.rejects},
                     {"context", pieces_json(p.context)},
                     {"error", p.error}});
    }
    j["per_publication"] = std::move(per);
  }
  return j;
}

ExtractionResult extraction_result_from_json(const json& j) {
  ExtractionResult r;
  r.protein = j.at("protein").get<std::string>();
  r.method = parse_method(j.at("method").get<std::string>());
  r.mutations = mutation_set(j.at("mutations"));
  r.reasoning = j.at("reasoning").get<std::string>();
  r.raw_response = j.value("raw_response", "");
  r.rejects = j.value("rejects", std::vector<std::string>{});
  r.context_pub_ids = j.value("context_pub_ids", std::set<std::string>{});
  if (j.contains("context")) r.context = pieces_from(j["context"]);
  r.error = j.value("error", "");
  if (j.contains("per_publication")) {
    std::vector<PublicationResult> per;
    for (const auto& p : j["per_publication"]) {
      PublicationResult slot;
      slot.pub_id = p.at("pub_id").get<std::string>();
      slot.distance = p.value("distance", 0.0);
      slot.mutations = mutation_set(p.at("mutations"));
      slot.reasoning = p.value("reasoning", "");
      slot.raw_response = p.value("raw_response", "");
      slot.rejects = p.value("rejects", std::vector<std::string>{});
      if (p.contains("context")) slot.context = pieces_from(p["context"]);
      slot.error = p.value("error", "");
      per.push_back(std::move(slot));
    }
    r.per_publication = std::move(per);
  }
  return r;
}

json to_json(const RunManifest& m) {
  json runs = json::array();
  for (const auto& run : m.runs) {
    runs.push_back({{"protein", run.protein},
                    {"iteration", run.iteration},
                    {"started_at", run.started_at},
                    {"finished_at", run.finished_at},
                    {"result", to_json(run.result)}});
  }
  return {{"method", std::string(to_string(m.method))},
          {"virus", m.virus},
          {"config", config_json(m.config)},
          {"query_mode", std::string(to_string(m.query_mode))},
          {"template_id", m.template_id},
          {"embedder", m.embedder},
          {"responder", m.responder},
          {"started_at", m.started_at},
          {"finished_at", m.finished_at},
          {"runs", std::move(runs)}};
}

RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.method = parse_method(j.at("method").get<std::string>());
    m.virus = j.value("virus", "");
    m.config = config_from(j.at("config"));
    m.query_mode = parse_query_mode(j.value("query_mode", "prompt"));
    m.template_id = j.value("template_id", "");
    m.embedder = j.value("embedder", json::object());
    m.responder = j.value("responder", json::object());
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    for (const auto& run : j.at("runs")) {
      m.runs.push_back({run.at("protein").get<std::string>(), run.at("iteration").get<std::size_t>(),
                        extraction_result_from_json(run.at("result")),
                        run.value("started_at", ""), run.value("finished_at", "")});
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("invalid run manifest: {}", e.what()));
  }
}

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write manifest '{}'", path.string()));
  out << to_json(manifest).dump(2) << '\n';
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open manifest '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("manifest '{}': {}", path.string(), e.what()));
  }
  return manifest_from_json(j);
}

Clock system_clock() {
  return [] {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                       tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  };
}

Clock fixed_clock() {
  return [] { return std::string("1970-01-01T00:00:00Z"); };
}

}  // namespace villa
