#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "villa/mutation.hpp"

namespace villa {

struct Publication {
  std::string pub_id;
  std::string title;
  std::string abstract;
  std::string full_text;  // main sections only
};

using Corpus = std::vector<Publication>;

/// Contiguous character window of one publication's text. Offsets and
/// lengths count Unicode scalar values.
struct Chunk {
  std::string pub_id;
  std::size_t chunk_index = 0;
  std::size_t start_offset = 0;
  std::string text;
};

/// Reads line-delimited JSON records {"pub_id", "title"?, "abstract",
/// "full_text"}. Blank lines are ignored. Throws ParseError carrying the
/// line number on a bad record; duplicate ids name both lines.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view jsonl);

void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// Fixed-size windows with stride size - overlap. The last window holds the
/// remaining tail; no empty trailing window is produced. `pub_id` is copied
/// into each chunk.
std::vector<Chunk> chunk_text(std::string_view text, std::size_t size, std::size_t overlap,
                              std::string_view pub_id = {});

struct ProteinTruth {
  MutationSet mutations;
  std::set<std::string> pub_ids;
  /// Which publications report each mutation.
  std::map<Mutation, std::set<std::string>> attributions;
};

struct GroundTruthDataset {
  std::map<std::string, ProteinTruth> proteins;

  std::vector<std::string> protein_names() const;
};

struct GroundTruthLoad {
  GroundTruthDataset dataset;
  std::vector<std::string> warnings;
};

/// CSV with header `protein,mutation,pub_id`. Mutations are normalized.
/// Publication ids absent from `known_pub_ids` (when non-empty) produce
/// warnings rather than errors.
GroundTruthLoad load_ground_truth(const std::filesystem::path& path,
                                  const std::set<std::string>& known_pub_ids = {});
GroundTruthLoad parse_ground_truth(std::string_view csv_text,
                                   const std::set<std::string>& known_pub_ids = {});

struct ProteinLookup {
  MutationSet mutations;
  std::set<std::string> pub_ids;
};

/// Unknown proteins yield empty sets.
ProteinLookup ground_truth_for_protein(const GroundTruthDataset& gt, std::string_view protein);

std::set<std::string> pub_id_set(const Corpus& corpus);

}  // namespace villa
