#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "villa/mann_whitney.hpp"
#include "villa/manifest.hpp"
#include "villa/metrics.hpp"

namespace villa {

enum class MetricScope { Overall, WrtContext, Context };

std::string_view to_string(MetricScope scope);  // overall | wrt_context | context

/// Scores of one (method, protein, iteration) run.
struct ScoreCell {
  std::string method;
  std::string protein;
  std::size_t iteration = 0;
  RunScores scores;
};

std::vector<ScoreCell> score_manifest(const RunManifest& manifest, const GroundTruthDataset& gt);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct ScopeSummary {
  MeanStd precision;
  MeanStd recall;
  MeanStd f1;
  std::size_t n = 0;
};

enum class StdKind { Population, Sample };

struct MethodSummary {
  std::string method;
  std::map<MetricScope, ScopeSummary> scopes;
};

struct ExperimentSummary {
  std::vector<ScoreCell> cells;
  std::map<std::string, MethodSummary> methods;  // keyed by method name
};

/// Mean and standard deviation of every metric per method over the
/// protein x iteration grid. Throws InvalidParameters on empty input.
ExperimentSummary aggregate(std::vector<ScoreCell> cells, StdKind kind = StdKind::Population);

MeanStd mean_std(std::span<const double> values, StdKind kind = StdKind::Population);

/// Long form: method,protein,iteration,metric_scope,precision,recall,f1,tp,fp,fn
void write_results_csv(std::ostream& out, const std::vector<ScoreCell>& cells);

struct MethodLabel {
  std::string responder;
  std::string datastore;
};

/// Datastore description used in the summary table for a method.
std::string datastore_label(Method method);

/// One row per method: method, responder, datastore and mean/std triples
/// for every scope.
nlohmann::json summary_json(const ExperimentSummary& summary,
                            const std::map<std::string, MethodLabel>& labels = {});

struct DistanceAnalysis {
  std::string protein;
  std::vector<double> relevant;
  std::vector<double> non_relevant;
  double mean_relevant = 0.0;
  double mean_non_relevant = 0.0;
  MannWhitneyResult test;
};

struct DistanceReport {
  std::vector<DistanceAnalysis> proteins;
  std::vector<std::string> warnings;
};

/// Distances from each protein's prompt embedding to the abstracts of its
/// relevant publications and to all other abstracts, with a Mann-Whitney U
/// test between the two samples. Proteins lacking relevant or non-relevant
/// abstracts are skipped with a warning.
DistanceReport abstract_distance_analysis(const Embedder& embedder, const GroundTruthDataset& gt,
                                          const VectorStore& abstracts,
                                          const std::map<std::string, std::string>& prompts);

nlohmann::json to_json(const DistanceReport& report);

struct SweepGrid {
  std::vector<std::size_t> k_a_values;
  std::vector<std::size_t> k_c_values;
};

struct SweepSetup {
  const Embedder* embedder = nullptr;
  const Responder* responder = nullptr;
  const VectorStore* abstracts = nullptr;
  const VectorStore* chunks = nullptr;
  const GroundTruthDataset* gt = nullptr;
  RetrievalConfig base;
  const PromptTemplate* tpl = nullptr;
  std::string virus;
  std::vector<std::string> proteins;
  std::size_t iterations = 1;
  QueryOptions query;
  std::size_t jobs = 1;  // grid cells run concurrently
  StdKind std_kind = StdKind::Population;
};

struct SweepRow {
  std::size_t k_a = 0;
  std::size_t k_c = 0;
  std::optional<ExperimentSummary> summary;
  std::string error;
};

/// Runs the two-level method at every (k_a, k_c) of the grid, k_a major. A
/// failing cell records its error and the sweep continues.
std::vector<SweepRow> sweep(const SweepGrid& grid, const SweepSetup& setup);

/// Long form: k_a,k_c,metric_scope,metric,mean,std,n,error
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace villa
