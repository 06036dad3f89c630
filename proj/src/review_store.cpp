#include "villa/review_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "villa/csv.hpp"

namespace villa {
namespace {

using nlohmann::json;

json item_json(const ReviewItem& i) {
  return {{"item_id", i.item_id},     {"virus", i.virus},     {"protein", i.protein},
          {"mutations", i.mutations}, {"reasoning", i.reasoning}, {"method", i.method},
          {"model", i.model},         {"iteration", i.iteration}};
}

ReviewItem item_from(const json& j) {
  return {j.at("item_id").get<std::string>(),
          j.at("virus").get<std::string>(),
          j.at("protein").get<std::string>(),
          j.at("mutations").get<std::vector<std::string>>(),
          j.at("reasoning").get<std::string>(),
          j.value("method", ""),
          j.value("model", ""),
          j.value("iteration", std::size_t{0})};
}

void write_all(int fd, std::string_view data, const std::string& what) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(fmt::format("write to {} failed: {}", what, std::strerror(errno)));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::string model_of(const json& responder) {
  if (responder.contains("model") && responder["model"].is_string()) {
    return responder["model"].get<std::string>();
  }
  if (responder.contains("kind") && responder["kind"].is_string()) {
    return "mock-" + responder["kind"].get<std::string>();
  }
  return "unknown";
}

}  // namespace

std::string_view to_string(ReviewStatus status) {
  return status == ReviewStatus::Pending ? "pending" : "completed";
}

void validate_scores(const std::map<std::string, int>& scores) {
  for (const auto& [category, _] : scores) {
    if (std::find(kRubricCategories.begin(), kRubricCategories.end(), category) ==
        kRubricCategories.end()) {
      throw ValidationError(fmt::format("unknown rubric category '{}'", category), category);
    }
  }
  for (auto category : kRubricCategories) {
    const auto it = scores.find(std::string(category));
    if (it == scores.end()) {
      throw ValidationError(fmt::format("missing score for '{}'", category), std::string(category));
    }
    if (it->second < 1 || it->second > 5) {
      throw ValidationError(
          fmt::format("score for '{}' must be between 1 and 5, got {}", category, it->second),
          std::string(category));
    }
  }
}

json to_json(const RubricEvaluation& e) {
  return {{"item_id", e.item_id},   {"evaluator_id", e.evaluator_id}, {"scores", e.scores},
          {"comment", e.comment}, {"submitted_at", e.submitted_at}};
}

RubricEvaluation rubric_evaluation_from_json(const json& j) {
  return {j.at("item_id").get<std::string>(), j.at("evaluator_id").get<std::string>(),
          j.at("scores").get<std::map<std::string, int>>(), j.value("comment", ""),
          j.value("submitted_at", "")};
}

ReviewStore::ReviewStore(std::filesystem::path dir, Clock clock, std::size_t compact_every)
    : dir_(std::move(dir)), clock_(std::move(clock)),
      compact_every_(std::max<std::size_t>(1, compact_every)), rng_(std::random_device{}()) {
  std::filesystem::create_directories(dir_);
  load();
  const auto journal = dir_ / "journal.jsonl";
  journal_fd_ = ::open(journal.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (journal_fd_ < 0) {
    throw Error(fmt::format("cannot open journal '{}': {}", journal.string(), std::strerror(errno)));
  }
  // Fold whatever the journal held (including a torn tail) into the snapshot.
  if (journal_records_ > 0 || std::filesystem::file_size(journal) > 0) compact();
}

ReviewStore::~ReviewStore() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
}

void ReviewStore::load() {
  const auto snapshot = dir_ / "snapshot.json";
  if (std::filesystem::exists(snapshot)) {
    std::ifstream in(snapshot);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(fmt::format("corrupt review snapshot '{}': {}", snapshot.string(), e.what()));
    }
    for (const auto& i : j.value("items", json::array())) {
      auto item = item_from(i);
      items_[item.item_id] = std::move(item);
    }
    for (const auto& e : j.value("evaluations", json::array())) {
      auto ev = rubric_evaluation_from_json(e);
      evaluations_[{ev.item_id, ev.evaluator_id}] = std::move(ev);
    }
  }
  const auto journal = dir_ / "journal.jsonl";
  if (!std::filesystem::exists(journal)) return;
  std::ifstream in(journal);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      spdlog::warn("review journal line {} is incomplete; ignoring it", line_no);
      continue;
    }
    apply(record);
    ++journal_records_;
  }
}

void ReviewStore::apply(const json& record) {
  const auto op = record.at("op").get<std::string>();
  if (op == "item") {
    auto item = item_from(record.at("item"));
    items_[item.item_id] = std::move(item);
  } else if (op == "evaluation") {
    auto ev = rubric_evaluation_from_json(record.at("evaluation"));
    evaluations_[{ev.item_id, ev.evaluator_id}] = std::move(ev);
  }
}

void ReviewStore::append(const json& record) {
  write_all(journal_fd_, record.dump() + "\n", "review journal");
  if (::fsync(journal_fd_) != 0) {
    throw Error(fmt::format("fsync of review journal failed: {}", std::strerror(errno)));
  }
  ++journal_records_;
}

void ReviewStore::maybe_compact() {
  if (journal_records_ >= compact_every_) compact();
}

void ReviewStore::write_snapshot() {
  json items = json::array();
  for (const auto& [_, item] : items_) items.push_back(item_json(item));
  json evaluations = json::array();
  for (const auto& [_, ev] : evaluations_) evaluations.push_back(to_json(ev));
  const std::string body = json{{"items", items}, {"evaluations", evaluations}}.dump();

  const auto tmp = dir_ / "snapshot.json.tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(fmt::format("cannot write '{}': {}", tmp.string(), std::strerror(errno)));
  try {
    write_all(fd, body, tmp.string());
    if (::fsync(fd) != 0) throw Error("fsync of review snapshot failed");
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::filesystem::rename(tmp, dir_ / "snapshot.json");
}

void ReviewStore::compact() {
  write_snapshot();
  if (::ftruncate(journal_fd_, 0) != 0 || ::fsync(journal_fd_) != 0) {
    throw Error(fmt::format("cannot truncate review journal: {}", std::strerror(errno)));
  }
  journal_records_ = 0;
}

std::string ReviewStore::new_item_id() {
  for (;;) {
    std::string id = fmt::format("{:016x}", rng_());
    if (!items_.contains(id)) return id;
  }
}

std::vector<std::string> ReviewStore::ingest(const RunManifest& manifest) {
  std::unique_lock lock(mutex_);
  std::vector<std::string> ids;
  const std::string method(to_string(manifest.method));
  const std::string model = model_of(manifest.responder);
  for (const auto& run : manifest.runs) {
    ReviewItem item;
    item.item_id = new_item_id();
    item.virus = manifest.virus;
    item.protein = run.protein;
    for (const auto& m : run.result.mutations) item.mutations.push_back(normalize(m));
    item.reasoning = run.result.reasoning;
    item.method = method;
    item.model = model;
    item.iteration = run.iteration;
    append({{"op", "item"}, {"item", item_json(item)}});
    ids.push_back(item.item_id);
    items_[item.item_id] = std::move(item);
  }
  maybe_compact();
  return ids;
}

ItemPage ReviewStore::list_items(std::string_view evaluator_id, const ItemQuery& query) const {
  static const std::vector<std::string> kSortKeys = {"item_id", "virus", "protein", "status"};
  if (std::find(kSortKeys.begin(), kSortKeys.end(), query.sort) == kSortKeys.end()) {
    throw ValidationError(fmt::format("unknown sort key '{}'", query.sort), "sort");
  }
  std::shared_lock lock(mutex_);
  std::vector<ItemView> views;
  for (const auto& [id, item] : items_) {
    if (query.virus && item.virus != *query.virus) continue;
    if (query.protein && item.protein != *query.protein) continue;
    const bool done = evaluations_.contains({id, std::string(evaluator_id)});
    const ReviewStatus status = done ? ReviewStatus::Completed : ReviewStatus::Pending;
    if (query.status && status != *query.status) continue;
    views.push_back({item, status});
  }
  lock.unlock();

  auto key = [&](const ItemView& v) -> std::string {
    if (query.sort == "virus") return v.item.virus;
    if (query.sort == "protein") return v.item.protein;
    if (query.sort == "status") return std::string(to_string(v.status));
    return v.item.item_id;
  };
  std::sort(views.begin(), views.end(), [&](const ItemView& a, const ItemView& b) {
    const auto lhs = std::make_pair(key(a), a.item.item_id);
    const auto rhs = std::make_pair(key(b), b.item.item_id);
    return query.descending ? rhs < lhs : lhs < rhs;
  });

  ItemPage page;
  page.total = views.size();
  const std::size_t size = std::max<std::size_t>(1, query.page_size);
  const std::size_t begin = (std::max<std::size_t>(1, query.page) - 1) * size;
  for (std::size_t i = begin; i < views.size() && i < begin + size; ++i) {
    page.items.push_back(std::move(views[i]));
  }
  return page;
}

std::optional<ReviewItem> ReviewStore::item(std::string_view item_id) const {
  std::shared_lock lock(mutex_);
  const auto it = items_.find(std::string(item_id));
  if (it == items_.end()) return std::nullopt;
  return it->second;
}

std::optional<RubricEvaluation> ReviewStore::evaluation(std::string_view item_id,
                                                        std::string_view evaluator_id) const {
  std::shared_lock lock(mutex_);
  const auto it = evaluations_.find({std::string(item_id), std::string(evaluator_id)});
  if (it == evaluations_.end()) return std::nullopt;
  return it->second;
}

std::vector<RubricEvaluation> ReviewStore::evaluations() const {
  std::shared_lock lock(mutex_);
  std::vector<RubricEvaluation> out;
  for (const auto& [_, ev] : evaluations_) out.push_back(ev);
  return out;
}

std::size_t ReviewStore::item_count() const {
  std::shared_lock lock(mutex_);
  return items_.size();
}

std::string ReviewStore::submit(RubricEvaluation evaluation) {
  validate_scores(evaluation.scores);
  if (evaluation.evaluator_id.empty()) throw ValidationError("missing evaluator id", "evaluator_id");
  std::unique_lock lock(mutex_);
  if (!items_.contains(evaluation.item_id)) {
    throw NotFound(fmt::format("no review item '{}'", evaluation.item_id));
  }
  evaluation.submitted_at = clock_();
  append({{"op", "evaluation"}, {"evaluation", to_json(evaluation)}});
  const std::string id = evaluation.item_id + ":" + evaluation.evaluator_id;
  evaluations_[{evaluation.item_id, evaluation.evaluator_id}] = std::move(evaluation);
  // Only after the in-memory state holds the record, or the snapshot would drop it.
  maybe_compact();
  return id;
}

void ReviewStore::export_csv(std::ostream& out) const {
  std::vector<std::string> header = {"item_id", "evaluator_id"};
  for (auto c : kRubricCategories) header.emplace_back(c);
  for (const char* col : {"comment", "submitted_at", "virus", "protein", "method", "model"}) {
    header.emplace_back(col);
  }
  csv::write_row(out, header);

  std::shared_lock lock(mutex_);
  for (const auto& [_, ev] : evaluations_) {
    std::vector<std::string> row = {ev.item_id, ev.evaluator_id};
    for (auto c : kRubricCategories) row.push_back(std::to_string(ev.scores.at(std::string(c))));
    const auto it = items_.find(ev.item_id);
    const ReviewItem empty;
    const ReviewItem& item = it == items_.end() ? empty : it->second;
    row.insert(row.end(), {ev.comment, ev.submitted_at, item.virus, item.protein, item.method,
                           item.model});
    csv::write_row(out, row);
  }
}

}  // namespace villa
