#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "villa/errors.hpp"
#include "villa/manifest.hpp"

namespace villa {

inline constexpr std::array<std::string_view, 5> kRubricCategories = {
    "clarity", "conciseness", "correctness", "citations_context", "contribution"};

/// One model output under review. `method` and `model` are never shown to
/// evaluators.
struct ReviewItem {
  std::string item_id;
  std::string virus;
  std::string protein;
  std::vector<std::string> mutations;
  std::string reasoning;
  std::string method;
  std::string model;
  std::size_t iteration = 0;

  bool operator==(const ReviewItem&) const = default;
};

struct RubricEvaluation {
  std::string item_id;
  std::string evaluator_id;
  std::map<std::string, int> scores;  // every rubric category, each 1..5
  std::string comment;
  std::string submitted_at;

  bool operator==(const RubricEvaluation&) const = default;
};

enum class ReviewStatus { Pending, Completed };
std::string_view to_string(ReviewStatus status);

/// Rejected submission; `field` names the offending rubric category.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& message, std::string field)
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Throws ValidationError for a missing, unknown or out-of-range category.
void validate_scores(const std::map<std::string, int>& scores);

struct ItemQuery {
  std::optional<std::string> virus;
  std::optional<std::string> protein;
  std::optional<ReviewStatus> status;
  std::string sort = "item_id";  // item_id | virus | protein | status
  bool descending = false;
  std::size_t page = 1;  // 1-based
  std::size_t page_size = 50;
};

struct ItemView {
  ReviewItem item;
  ReviewStatus status = ReviewStatus::Pending;
};

struct ItemPage {
  std::vector<ItemView> items;
  std::size_t total = 0;
};

/// Review items and rubric evaluations persisted as a snapshot plus an
/// append-only journal under one directory. Every mutation is fsynced to
/// the journal before it returns; the journal is folded into the snapshot
/// every `compact_every` records.
class ReviewStore {
 public:
  explicit ReviewStore(std::filesystem::path dir, Clock clock = system_clock(),
                       std::size_t compact_every = 256);
  ~ReviewStore();
  ReviewStore(const ReviewStore&) = delete;
  ReviewStore& operator=(const ReviewStore&) = delete;

  /// One item per run record, with fresh anonymous ids. Returns the ids.
  std::vector<std::string> ingest(const RunManifest& manifest);

  /// `status` is computed for `evaluator_id`. Ordering is total: ties on
  /// the sort key fall back to item_id in the same direction.
  ItemPage list_items(std::string_view evaluator_id, const ItemQuery& query) const;

  std::optional<ReviewItem> item(std::string_view item_id) const;
  std::optional<RubricEvaluation> evaluation(std::string_view item_id,
                                             std::string_view evaluator_id) const;
  std::vector<RubricEvaluation> evaluations() const;
  std::size_t item_count() const;

  /// Upserts by (item_id, evaluator_id). Throws NotFound for an unknown
  /// item, ValidationError for bad scores. Returns the record id.
  std::string submit(RubricEvaluation evaluation);

  /// Header plus one row per evaluation, including the unblinded method
  /// and model columns.
  void export_csv(std::ostream& out) const;

  void compact();

 private:
  void load();
  void append(const nlohmann::json& record);
  void maybe_compact();
  void apply(const nlohmann::json& record);
  void write_snapshot();
  std::string new_item_id();

  std::filesystem::path dir_;
  Clock clock_;
  std::size_t compact_every_;
  std::size_t journal_records_ = 0;
  int journal_fd_ = -1;

  std::map<std::string, ReviewItem> items_;
  std::map<std::pair<std::string, std::string>, RubricEvaluation> evaluations_;
  mutable std::shared_mutex mutex_;
  std::mt19937_64 rng_;
};

nlohmann::json to_json(const RubricEvaluation& evaluation);
RubricEvaluation rubric_evaluation_from_json(const nlohmann::json& j);

}  // namespace villa
