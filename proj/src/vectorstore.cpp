#include "villa/vectorstore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include <fmt/format.h>

#include "villa/errors.hpp"

namespace villa {
namespace {

constexpr char kMagic[8] = {'V', 'I', 'L', 'L', 'A', 'V', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

double squared_norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * static_cast<double>(x);
  return s;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return s;
}

double distance_from(double dot_ab, double norm_a, double norm_b) {
  return std::clamp(1.0 - dot_ab / (norm_a * norm_b), 0.0, 2.0);
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string& buffer() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw StoreFormatError(
          fmt::format("truncated store: need {} bytes for {} at offset {}, {} left", n, what, pos_,
                      remaining()),
          pos_);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    need(n, what);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n, const char* what) {
    need(n, what);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(EntryKind kind) {
  return kind == EntryKind::Abstract ? "abstract" : "chunk";
}

std::string make_entry_id(std::string_view pub_id, EntryKind kind, std::uint32_t chunk_index) {
  if (kind == EntryKind::Abstract) return fmt::format("{}#a", pub_id);
  return fmt::format("{}#c{:06}", pub_id, chunk_index);
}

double cosine_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw InvalidParameters(
        fmt::format("cosine distance: dimension mismatch ({} vs {})", a.size(), b.size()));
  }
  const double na = squared_norm(a);
  const double nb = squared_norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw InvalidParameters("cosine distance is undefined for a zero vector");
  }
  return distance_from(dot(a, b), std::sqrt(na), std::sqrt(nb));
}

VectorStore::VectorStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidParameters("vector store dimension must be positive");
}

std::size_t VectorStore::size() const {
  std::shared_lock lock(*mutex_);
  return rows_.size();
}

void VectorStore::insert(DatastoreEntry entry) {
  if (entry.vector.size() != dim_) {
    throw InvalidParameters(fmt::format("entry '{}' has dimension {}, store has {}",
                                        entry.entry_id, entry.vector.size(), dim_));
  }
  const double norm2 = squared_norm(entry.vector);
  if (norm2 == 0.0 || !std::isfinite(norm2)) {
    throw InvalidParameters(fmt::format("entry '{}' has a zero or non-finite vector", entry.entry_id));
  }
  if (entry.entry_id.empty()) {
    entry.entry_id = make_entry_id(entry.pub_id, entry.kind, entry.chunk_index);
  }

  std::unique_lock lock(*mutex_);
  const Key key{entry.pub_id, entry.kind, entry.chunk_index};
  const auto existing = by_key_.find(key);
  if (auto id_it = by_id_.find(entry.entry_id);
      id_it != by_id_.end() && (existing == by_key_.end() || existing->second != id_it->second)) {
    throw InvalidParameters(
        fmt::format("entry_id '{}' already belongs to another entry", entry.entry_id));
  }

  std::size_t row;
  if (existing != by_key_.end()) {
    row = existing->second;
    by_id_.erase(rows_[row].entry_id);
  } else {
    row = rows_.size();
    rows_.emplace_back();
    norms_.push_back(0.0);
    vectors_.resize(vectors_.size() + dim_);
    by_key_.emplace(key, row);
    by_pub_[entry.pub_id].push_back(row);
  }
  std::copy(entry.vector.begin(), entry.vector.end(),
            vectors_.begin() + static_cast<std::ptrdiff_t>(row * dim_));
  norms_[row] = std::sqrt(norm2);
  by_id_[entry.entry_id] = row;
  rows_[row] = Row{std::move(entry.entry_id), std::move(entry.pub_id), entry.kind,
                   entry.chunk_index, std::move(entry.text)};
}

DatastoreEntry VectorStore::entry_at(std::size_t row) const {
  const Row& r = rows_[row];
  const auto begin = vectors_.begin() + static_cast<std::ptrdiff_t>(row * dim_);
  return DatastoreEntry{r.entry_id, r.pub_id, r.kind, r.chunk_index,
                        EmbeddingVector(begin, begin + static_cast<std::ptrdiff_t>(dim_)), r.text};
}

double VectorStore::distance_at(std::span<const float> query, double query_norm,
                                std::size_t row) const {
  const std::span<const float> v(vectors_.data() + row * dim_, dim_);
  return distance_from(dot(query, v), query_norm, norms_[row]);
}

std::vector<ScoredEntry> VectorStore::top_k(std::span<const float> query, std::size_t k,
                                            double threshold, const RetrievalFilter& filter) const {
  if (k == 0) throw InvalidParameters("top_k needs k >= 1");
  if (!(threshold >= 0.0 && threshold <= 2.0)) {
    throw InvalidParameters(fmt::format("distance threshold {} outside [0, 2]", threshold));
  }
  if (query.size() != dim_) {
    throw InvalidParameters(
        fmt::format("query has dimension {}, store has {}", query.size(), dim_));
  }
  const double qn2 = squared_norm(query);
  if (qn2 == 0.0) throw InvalidParameters("cosine distance is undefined for a zero query");
  const double qn = std::sqrt(qn2);

  std::shared_lock lock(*mutex_);
  struct Candidate {
    double distance;
    std::size_t row;
  };
  std::vector<Candidate> candidates;
  auto consider = [&](std::size_t row) {
    const double d = distance_at(query, qn, row);
    if (d <= threshold) candidates.push_back({d, row});
  };
  if (filter.pub_id) {
    if (auto it = by_pub_.find(*filter.pub_id); it != by_pub_.end()) {
      for (std::size_t row : it->second) consider(row);
    }
  } else {
    for (std::size_t row = 0; row < rows_.size(); ++row) consider(row);
  }

  const auto less = [&](const Candidate& a, const Candidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return rows_[a.row].entry_id < rows_[b.row].entry_id;
  };
  const std::size_t n = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n),
                    candidates.end(), less);

  std::vector<ScoredEntry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({entry_at(candidates[i].row), candidates[i].distance});
  }
  return out;
}

std::vector<ScoredEntry> VectorStore::scan(std::span<const float> query) const {
  if (query.size() != dim_) {
    throw InvalidParameters(
        fmt::format("query has dimension {}, store has {}", query.size(), dim_));
  }
  const double qn2 = squared_norm(query);
  if (qn2 == 0.0) throw InvalidParameters("cosine distance is undefined for a zero query");
  const double qn = std::sqrt(qn2);
  std::shared_lock lock(*mutex_);
  std::vector<ScoredEntry> out;
  out.reserve(rows_.size());
  for (std::size_t row = 0; row < rows_.size(); ++row) {
    out.push_back({entry_at(row), distance_at(query, qn, row)});
  }
  return out;
}

std::optional<DatastoreEntry> VectorStore::find(std::string_view entry_id) const {
  std::shared_lock lock(*mutex_);
  const auto it = by_id_.find(std::string(entry_id));
  if (it == by_id_.end()) return std::nullopt;
  return entry_at(it->second);
}

std::vector<DatastoreEntry> VectorStore::entries() const {
  std::shared_lock lock(*mutex_);
  std::vector<DatastoreEntry> out;
  out.reserve(rows_.size());
  for (std::size_t row = 0; row < rows_.size(); ++row) out.push_back(entry_at(row));
  return out;
}

std::vector<std::string> VectorStore::pub_ids() const {
  std::shared_lock lock(*mutex_);
  std::vector<std::string> out;
  for (const auto& r : rows_) {
    if (std::find(out.begin(), out.end(), r.pub_id) == out.end()) out.push_back(r.pub_id);
  }
  return out;
}

// Layout (little-endian):
//   magic[8] version:u32 dim:u32 count:u64
//   count x { length:u32, entry_id:str, pub_id:str, kind:u8, chunk_index:u32,
//             vector:f32[dim], text:str }      str = length:u32 + UTF-8 bytes
std::string VectorStore::serialize() const {
  std::shared_lock lock(*mutex_);
  Writer w;
  w.raw(std::string_view(kMagic, sizeof kMagic));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(dim_));
  w.u64(rows_.size());
  for (std::size_t row = 0; row < rows_.size(); ++row) {
    const Row& r = rows_[row];
    Writer rec;
    rec.str(r.entry_id);
    rec.str(r.pub_id);
    rec.u8(static_cast<std::uint8_t>(r.kind));
    rec.u32(r.chunk_index);
    for (std::size_t i = 0; i < dim_; ++i) rec.f32(vectors_[row * dim_ + i]);
    rec.str(r.text);
    w.u32(static_cast<std::uint32_t>(rec.buffer().size()));
    w.raw(rec.buffer());
  }
  return std::move(w.buffer());
}

VectorStore VectorStore::deserialize(std::string_view bytes) {
  Reader r(bytes);
  if (r.raw(sizeof kMagic, "magic") != std::string_view(kMagic, sizeof kMagic)) {
    throw StoreFormatError("not a vector store file (bad magic)", 0);
  }
  const std::uint32_t version = r.u32("version");
  if (version != kVersion) {
    throw StoreFormatError(fmt::format("unsupported store version {}", version), 8);
  }
  const std::uint32_t dim = r.u32("dim");
  if (dim == 0) throw StoreFormatError("store dimension is zero", 12);
  const std::uint64_t count = r.u64("count");

  VectorStore store(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t record_start = r.offset();
    const std::uint32_t length = r.u32("record length");
    r.need(length, "record body");
    const std::size_t body_start = r.offset();

    DatastoreEntry e;
    e.entry_id = r.str("entry_id");
    e.pub_id = r.str("pub_id");
    const std::uint8_t kind = r.u8("kind");
    if (kind > 1) {
      throw StoreFormatError(fmt::format("record {} has invalid kind {}", i, kind), r.offset() - 1);
    }
    e.kind = static_cast<EntryKind>(kind);
    e.chunk_index = r.u32("chunk_index");
    e.vector.resize(dim);
    for (auto& x : e.vector) x = r.f32("vector");
    e.text = r.str("text");
    if (r.offset() - body_start != length) {
      throw StoreFormatError(fmt::format("record {} at offset {} declares {} bytes but holds {}", i,
                                         record_start, length, r.offset() - body_start),
                             record_start);
    }
    try {
      store.insert(std::move(e));
    } catch (const InvalidParameters& err) {
      throw StoreFormatError(
          fmt::format("record {} at offset {}: {}", i, record_start, err.what()), record_start);
    }
  }
  if (r.remaining() != 0) {
    throw StoreFormatError(fmt::format("{} trailing bytes after last record", r.remaining()),
                           r.offset());
  }
  return store;
}

void VectorStore::save(const std::filesystem::path& path) const {
  const std::string bytes = serialize();
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(fmt::format("write to '{}' failed", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

VectorStore VectorStore::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open store '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace villa
