#include "villa/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "villa/csv.hpp"
#include "villa/errors.hpp"
#include "villa/unicode.hpp"

namespace villa {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string required_string(const json& record, const char* field, std::size_t line) {
  const auto it = record.find(field);
  if (it == record.end()) {
    throw ParseError(fmt::format("line {}: missing field '{}'", line, field), line);
  }
  if (!it->is_string()) {
    throw ParseError(fmt::format("line {}: field '{}' must be a string", line, field), line);
  }
  return it->get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::string_view jsonl) {
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> first_line;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    std::size_t eol = jsonl.find('\n', pos);
    if (eol == std::string_view::npos) eol = jsonl.size();
    std::string_view line = jsonl.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(fmt::format("line {}: invalid JSON: {}", line_no, e.what()), line_no);
    }
    if (!record.is_object()) {
      throw ParseError(fmt::format("line {}: expected a JSON object", line_no), line_no);
    }

    Publication pub;
    pub.pub_id = required_string(record, "pub_id", line_no);
    pub.abstract = required_string(record, "abstract", line_no);
    pub.full_text = required_string(record, "full_text", line_no);
    if (auto it = record.find("title"); it != record.end() && it->is_string()) {
      pub.title = it->get<std::string>();
    }
    if (pub.pub_id.empty()) {
      throw ParseError(fmt::format("line {}: empty pub_id", line_no), line_no);
    }
    if (pub.abstract.empty()) {
      throw ParseError(fmt::format("line {}: empty abstract for '{}'", line_no, pub.pub_id),
                       line_no);
    }
    if (auto [it, inserted] = first_line.emplace(pub.pub_id, line_no); !inserted) {
      throw ParseError(fmt::format("duplicate pub_id '{}' on lines {} and {}", pub.pub_id,
                                   it->second, line_no),
                       line_no);
    }
    corpus.push_back(std::move(pub));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(fmt::format("corpus file '{}' does not exist", path.string()));
  }
  return parse_corpus(read_file(path));
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  for (const auto& pub : corpus) {
    json record = {{"pub_id", pub.pub_id}, {"abstract", pub.abstract}, {"full_text", pub.full_text}};
    if (!pub.title.empty()) record["title"] = pub.title;
    out << record.dump() << '\n';
  }
}

std::vector<Chunk> chunk_text(std::string_view text, std::size_t size, std::size_t overlap,
                              std::string_view pub_id) {
  if (size == 0 || overlap >= size) {
    throw InvalidParameters(
        fmt::format("chunk overlap ({}) must be smaller than chunk size ({})", overlap, size));
  }
  if (text.empty()) throw InvalidParameters("cannot chunk empty text");

  const auto offsets = unicode::code_point_offsets(text);
  const std::size_t length = offsets.size() - 1;
  const std::size_t stride = size - overlap;

  std::vector<Chunk> chunks;
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(start + size, length);
    chunks.push_back(Chunk{std::string(pub_id), chunks.size(), start,
                           std::string(text.substr(offsets[start], offsets[end] - offsets[start]))});
    if (end == length) break;
  }
  return chunks;
}

std::vector<std::string> GroundTruthDataset::protein_names() const {
  std::vector<std::string> names;
  names.reserve(proteins.size());
  for (const auto& [name, _] : proteins) names.push_back(name);
  return names;
}

GroundTruthLoad parse_ground_truth(std::string_view csv_text,
                                   const std::set<std::string>& known_pub_ids) {
  GroundTruthLoad result;
  const auto records = csv::parse(csv_text);
  if (records.empty()) return result;

  const auto& header = records.front().fields;
  if (header != std::vector<std::string>{"protein", "mutation", "pub_id"}) {
    throw ParseError("ground truth header must be 'protein,mutation,pub_id'", records.front().line);
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 3) {
      throw ParseError(fmt::format("row {} (line {}): expected 3 fields, got {}", r, rec.line,
                                   rec.fields.size()),
                       rec.line);
    }
    const std::string& protein = rec.fields[0];
    const std::string& pub_id = rec.fields[2];
    if (protein.empty() || pub_id.empty()) {
      throw ParseError(fmt::format("row {} (line {}): empty protein or pub_id", r, rec.line),
                       rec.line);
    }
    Mutation m;
    try {
      m = parse_mutation(rec.fields[1]);
    } catch (const MutationParseError& e) {
      throw ParseError(fmt::format("row {} (line {}): {}", r, rec.line, e.what()), rec.line);
    }
    if (!known_pub_ids.empty() && !known_pub_ids.contains(pub_id)) {
      result.warnings.push_back(fmt::format("row {} (line {}): unknown publication id '{}'", r,
                                            rec.line, pub_id));
    }
    auto& truth = result.dataset.proteins[protein];
    truth.mutations.insert(m);
    truth.pub_ids.insert(pub_id);
    truth.attributions[m].insert(pub_id);
  }
  return result;
}

GroundTruthLoad load_ground_truth(const std::filesystem::path& path,
                                  const std::set<std::string>& known_pub_ids) {
  if (!std::filesystem::exists(path)) {
    throw Error(fmt::format("ground truth file '{}' does not exist", path.string()));
  }
  return parse_ground_truth(read_file(path), known_pub_ids);
}

ProteinLookup ground_truth_for_protein(const GroundTruthDataset& gt, std::string_view protein) {
  const auto it = gt.proteins.find(std::string(protein));
  if (it == gt.proteins.end()) return {};
  return {it->second.mutations, it->second.pub_ids};
}

std::set<std::string> pub_id_set(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& pub : corpus) ids.insert(pub.pub_id);
  return ids;
}

}  // namespace villa
