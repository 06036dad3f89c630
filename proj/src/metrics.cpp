#include "villa/metrics.hpp"

#include <fmt/format.h>

#include "villa/errors.hpp"

namespace villa {

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Metrics m{0.0, 0.0, 0.0, tp, fp, fn};
  if (tp + fp == 0 && tp + fn == 0) {
    m.precision = m.recall = m.f1 = 1.0;
    return m;
  }
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

Metrics context_metrics(const ExtractionResult& result, const std::set<std::string>& gt_pub_ids) {
  return set_metrics(result.context_pub_ids, gt_pub_ids);
}

MutationSet context_restricted_truth(const GroundTruthDataset& gt, std::string_view protein,
                                     const std::set<std::string>& pub_ids) {
  MutationSet out;
  const auto it = gt.proteins.find(std::string(protein));
  if (it == gt.proteins.end()) return out;
  for (const auto& [mutation, sources] : it->second.attributions) {
    for (const auto& pub : sources) {
      if (pub_ids.contains(pub)) {
        out.insert(mutation);
        break;
      }
    }
  }
  return out;
}

RunScores score_run(const ExtractionResult& result, const GroundTruthDataset& gt,
                    std::string_view protein) {
  const auto it = gt.proteins.find(std::string(protein));
  if (it == gt.proteins.end()) {
    throw NotFound(fmt::format("protein '{}' is not in the ground truth", protein));
  }
  const MutationSet retrieved = result.error.empty() ? result.mutations : MutationSet{};
  RunScores s;
  s.overall = set_metrics(retrieved, it->second.mutations);
  s.wrt_context =
      set_metrics(retrieved, context_restricted_truth(gt, protein, result.context_pub_ids));
  s.context = context_metrics(result, it->second.pub_ids);
  return s;
}

}  // namespace villa
