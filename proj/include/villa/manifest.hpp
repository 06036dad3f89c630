#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "villa/pipeline.hpp"

namespace villa {

struct RunRecord {
  std::string protein;
  std::size_t iteration = 0;
  ExtractionResult result;
  std::string started_at;
  std::string finished_at;

  bool operator==(const RunRecord&) const = default;
};

/// One method run over a set of proteins and iterations: the unit consumed
/// by scoring and by the review service.
struct RunManifest {
  Method method = Method::ZeroShot;
  std::string virus;
  RetrievalConfig config;
  QueryMode query_mode = QueryMode::Prompt;
  std::string template_id;
  nlohmann::json embedder = nlohmann::json::object();
  nlohmann::json responder = nlohmann::json::object();
  std::string started_at;
  std::string finished_at;
  std::vector<RunRecord> runs;

  bool operator==(const RunManifest&) const = default;
};

nlohmann::json to_json(const ExtractionResult& result);
ExtractionResult extraction_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Pretty-printed with sorted keys so identical manifests are byte-identical.
void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);

/// Source of timestamps written into manifests.
using Clock = std::function<std::string()>;
/// UTC ISO-8601 with seconds.
Clock system_clock();
/// Always "1970-01-01T00:00:00Z"; makes manifests reproducible.
Clock fixed_clock();

}  // namespace villa
