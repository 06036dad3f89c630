#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>

#include "villa/corpus.hpp"
#include "villa/pipeline.hpp"

namespace villa {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  bool operator==(const Metrics&) const = default;
};

/// Precision, recall and F1 from raw counts. Undefined ratios are 0, except
/// that an empty retrieval against an empty truth scores 1 across the board.
Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

template <typename T>
Metrics set_metrics(const std::set<T>& retrieved, const std::set<T>& truth) {
  std::size_t tp = 0;
  for (const auto& x : retrieved) tp += truth.count(x);
  return metrics_from_counts(tp, retrieved.size() - tp, truth.size() - tp);
}

/// Publications in the context against the protein's relevant publications.
Metrics context_metrics(const ExtractionResult& result, const std::set<std::string>& gt_pub_ids);

/// Mutations of `protein` attributed to at least one publication in `pub_ids`.
MutationSet context_restricted_truth(const GroundTruthDataset& gt, std::string_view protein,
                                     const std::set<std::string>& pub_ids);

struct RunScores {
  Metrics overall;      // against every ground-truth mutation of the protein
  Metrics wrt_context;  // against mutations reported by the context's publications
  Metrics context;      // publication-level context quality

  bool operator==(const RunScores&) const = default;
};

/// Throws NotFound when `protein` is not in the ground truth.
RunScores score_run(const ExtractionResult& result, const GroundTruthDataset& gt,
                    std::string_view protein);

}  // namespace villa
