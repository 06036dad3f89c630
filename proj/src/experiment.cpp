#include "villa/experiment.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "villa/csv.hpp"
#include "villa/errors.hpp"
#include "villa/parallel.hpp"

namespace villa {

std::string_view to_string(MetricScope scope) {
  switch (scope) {
    case MetricScope::Overall:
      return "overall";
    case MetricScope::WrtContext:
      return "wrt_context";
    case MetricScope::Context:
      return "context";
  }
  return "unknown";
}

namespace {

constexpr MetricScope kScopes[] = {MetricScope::Overall, MetricScope::WrtContext,
                                   MetricScope::Context};

const Metrics& pick(const RunScores& s, MetricScope scope) {
  switch (scope) {
    case MetricScope::Overall:
      return s.overall;
    case MetricScope::WrtContext:
      return s.wrt_context;
    case MetricScope::Context:
      break;
  }
  return s.context;
}

std::string num(double x) { return fmt::format("{:.6f}", x); }

}  // namespace

std::vector<ScoreCell> score_manifest(const RunManifest& manifest, const GroundTruthDataset& gt) {
  std::vector<ScoreCell> cells;
  cells.reserve(manifest.runs.size());
  for (const auto& run : manifest.runs) {
    cells.push_back({std::string(to_string(manifest.method)), run.protein, run.iteration,
                     score_run(run.result, gt, run.protein)});
  }
  return cells;
}

MeanStd mean_std(std::span<const double> values, StdKind kind) {
  if (values.empty()) throw InvalidParameters("mean of an empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double denom = kind == StdKind::Population ? n : n - 1.0;
  return {mean, denom > 0.0 ? std::sqrt(ss / denom) : 0.0};
}

ExperimentSummary aggregate(std::vector<ScoreCell> cells, StdKind kind) {
  if (cells.empty()) throw InvalidParameters("cannot aggregate an empty set of cells");
  ExperimentSummary summary;
  std::map<std::string, std::vector<const ScoreCell*>> by_method;
  for (const auto& c : cells) by_method[c.method].push_back(&c);

  for (const auto& [method, group] : by_method) {
    MethodSummary ms;
    ms.method = method;
    for (MetricScope scope : kScopes) {
      std::vector<double> p, r, f;
      for (const ScoreCell* c : group) {
        const Metrics& m = pick(c->scores, scope);
        p.push_back(m.precision);
        r.push_back(m.recall);
        f.push_back(m.f1);
      }
      ms.scopes[scope] = ScopeSummary{mean_std(p, kind), mean_std(r, kind), mean_std(f, kind),
                                      group.size()};
    }
    summary.methods.emplace(method, std::move(ms));
  }
  summary.cells = std::move(cells);
  return summary;
}

void write_results_csv(std::ostream& out, const std::vector<ScoreCell>& cells) {
  csv::write_row(out, {"method", "protein", "iteration", "metric_scope", "precision", "recall",
                       "f1", "tp", "fp", "fn"});
  for (const auto& c : cells) {
    for (MetricScope scope : kScopes) {
      const Metrics& m = pick(c.scores, scope);
      csv::write_row(out, {c.method, c.protein, std::to_string(c.iteration),
                           std::string(to_string(scope)), num(m.precision), num(m.recall),
                           num(m.f1), std::to_string(m.tp), std::to_string(m.fp),
                           std::to_string(m.fn)});
    }
  }
}

std::string datastore_label(Method method) {
  switch (method) {
    case Method::ZeroShot:
      return "none";
    case Method::RagAbstracts:
      return "abstracts";
    case Method::RagFulltext:
      return "full text";
    case Method::Villa:
      return "abstracts + full text";
  }
  return "";
}

nlohmann::json summary_json(const ExperimentSummary& summary,
                            const std::map<std::string, MethodLabel>& labels) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [method, ms] : summary.methods) {
    nlohmann::json row = {{"method", method}};
    if (auto it = labels.find(method); it != labels.end()) {
      row["responder"] = it->second.responder;
      row["datastore"] = it->second.datastore;
    } else {
      row["responder"] = "";
      row["datastore"] = datastore_label(parse_method(method));
    }
    for (const auto& [scope, s] : ms.scopes) {
      auto triple = [](const MeanStd& x) { return nlohmann::json{{"mean", x.mean}, {"std", x.std}}; };
      row[std::string(to_string(scope))] = {{"precision", triple(s.precision)},
                                            {"recall", triple(s.recall)},
                                            {"f1", triple(s.f1)},
                                            {"n", s.n}};
    }
    rows.push_back(std::move(row));
  }
  return {{"methods", std::move(rows)}};
}

DistanceReport abstract_distance_analysis(const Embedder& embedder, const GroundTruthDataset& gt,
                                          const VectorStore& abstracts,
                                          const std::map<std::string, std::string>& prompts) {
  DistanceReport report;
  for (const auto& [protein, prompt] : prompts) {
    const auto truth = ground_truth_for_protein(gt, protein);
    const auto query = embedder.embed(prompt, EmbedRole::Query);
    DistanceAnalysis a;
    a.protein = protein;
    for (const auto& scored : abstracts.scan(query)) {
      if (scored.entry.kind != EntryKind::Abstract) continue;
      (truth.pub_ids.contains(scored.entry.pub_id) ? a.relevant : a.non_relevant)
          .push_back(scored.distance);
    }
    if (a.relevant.empty() || a.non_relevant.empty()) {
      auto msg = fmt::format("protein '{}': {} relevant and {} non-relevant abstracts; skipped",
                             protein, a.relevant.size(), a.non_relevant.size());
      spdlog::warn("{}", msg);
      report.warnings.push_back(std::move(msg));
      continue;
    }
    a.mean_relevant = mean_std(a.relevant).mean;
    a.mean_non_relevant = mean_std(a.non_relevant).mean;
    a.test = mann_whitney_u(a.relevant, a.non_relevant);
    report.proteins.push_back(std::move(a));
  }
  return report;
}

nlohmann::json to_json(const DistanceReport& report) {
  nlohmann::json proteins = nlohmann::json::array();
  for (const auto& a : report.proteins) {
    proteins.push_back({{"protein", a.protein},
                        {"relevant", a.relevant},
                        {"non_relevant", a.non_relevant},
                        {"mean_relevant", a.mean_relevant},
                        {"mean_non_relevant", a.mean_non_relevant},
                        {"n_relevant", a.test.n_a},
                        {"n_non_relevant", a.test.n_b},
                        {"u", a.test.u_a},
                        {"p", a.test.p_two_sided},
                        {"exact", a.test.exact}});
  }
  return {{"proteins", std::move(proteins)}, {"warnings", report.warnings}};
}

std::vector<SweepRow> sweep(const SweepGrid& grid, const SweepSetup& setup) {
  if (grid.k_a_values.empty() || grid.k_c_values.empty()) {
    throw InvalidParameters("sweep grid must have at least one k_a and one k_c value");
  }
  if (!setup.embedder || !setup.responder || !setup.abstracts || !setup.chunks || !setup.gt ||
      !setup.tpl) {
    throw InvalidParameters("sweep setup is incomplete");
  }
  std::vector<SweepRow> rows;
  for (std::size_t ka : grid.k_a_values) {
    for (std::size_t kc : grid.k_c_values) rows.push_back({ka, kc, std::nullopt, {}});
  }

  parallel_for(rows.size(), setup.jobs, [&](std::size_t i) {
    SweepRow& row = rows[i];
    try {
      RetrievalConfig config = setup.base;
      config.k_a = row.k_a;
      config.k_c = row.k_c;
      std::vector<ScoreCell> cells;
      for (std::size_t it = 0; it < setup.iterations; ++it) {
        for (const auto& protein : setup.proteins) {
          const auto result = villa(*setup.embedder, *setup.responder, *setup.abstracts,
                                    *setup.chunks, config, *setup.tpl, setup.virus, protein,
                                    setup.query);
          cells.push_back({std::string(to_string(Method::Villa)), protein, it,
                           score_run(result, *setup.gt, protein)});
        }
      }
      row.summary = aggregate(std::move(cells), setup.std_kind);
    } catch (const std::exception& e) {
      row.error = e.what();
      spdlog::warn("sweep cell k_a={} k_c={} failed: {}", row.k_a, row.k_c, row.error);
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  csv::write_row(out, {"k_a", "k_c", "metric_scope", "metric", "mean", "std", "n", "error"});
  for (const auto& row : rows) {
    const std::string ka = std::to_string(row.k_a);
    const std::string kc = std::to_string(row.k_c);
    if (!row.summary) {
      csv::write_row(out, {ka, kc, "", "", "", "", "", row.error});
      continue;
    }
    for (const auto& [method, ms] : row.summary->methods) {
      for (const auto& [scope, s] : ms.scopes) {
        const std::pair<const char*, MeanStd> metrics[] = {
            {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
        for (const auto& [name, v] : metrics) {
          csv::write_row(out, {ka, kc, std::string(to_string(scope)), name, num(v.mean),
                               num(v.std), std::to_string(s.n), ""});
        }
      }
    }
  }
}

}  // namespace villa
