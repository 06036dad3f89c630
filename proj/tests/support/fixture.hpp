#pragma once

// Synthetic six-publication corpus: two publications per protein. Abstracts
// name the protein but never a mutation; each full text reports all of its
// mutations in the opening sentence, well inside chunk 0.

#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "villa/corpus.hpp"
#include "villa/ingest.hpp"

namespace villa::testing {

inline constexpr std::size_t kFixtureChunkSize = 120;
inline constexpr std::size_t kFixtureChunkOverlap = 20;
inline constexpr const char* kFixtureVirus = "influenza A";

struct FixturePub {
  const char* pub_id;
  const char* protein;
  const char* topic;  // distinguishes otherwise similar abstracts
  const char* m1;
  const char* m2;
};

inline const std::vector<FixturePub>& fixture_pubs() {
  static const std::vector<FixturePub> pubs = {
      {"P1", "HA", "ferret transmission", "A12T", "G45R"},
      {"P2", "HA", "receptor binding", "K60E", "D101N"},
      {"P3", "NA", "drug resistance", "H274Y", "E119V"},
      {"P4", "NA", "enzyme activity", "R292K", "N294S"},
      {"P5", "PB2", "mammalian adaptation", "E627K", "D701N"},
      {"P6", "PB2", "polymerase activity", "K526R", "T271A"},
  };
  return pubs;
}

inline std::string fixture_full_text(const FixturePub& p) {
  std::string text = fmt::format("Mutations in {} of influenza A: {} and {} were detected in the {} gene.",
                                 p.protein, p.m1, p.m2, p.protein);
  for (int i = 0; i < 4; ++i) {
    text += fmt::format(" Supplementary {} sequencing protocol used standard primers and controls.",
                        p.protein);
  }
  return text;
}

inline Corpus fixture_corpus() {
  Corpus corpus;
  for (const auto& p : fixture_pubs()) {
    Publication pub;
    pub.pub_id = p.pub_id;
    pub.title = fmt::format("{} study of {}", p.topic, p.protein);
    pub.abstract = fmt::format(
        "We characterize the {} protein of influenza A virus isolates with a focus on {}.",
        p.protein, p.topic);
    pub.full_text = fixture_full_text(p);
    corpus.push_back(std::move(pub));
  }
  return corpus;
}

inline std::string fixture_ground_truth_csv() {
  std::string csv = "protein,mutation,pub_id\n";
  for (const auto& p : fixture_pubs()) {
    csv += fmt::format("{},{},{}\n{},{},{}\n", p.protein, p.m1, p.pub_id, p.protein, p.m2, p.pub_id);
  }
  return csv;
}

inline GroundTruthDataset fixture_ground_truth() {
  return parse_ground_truth(fixture_ground_truth_csv()).dataset;
}

inline StoreBuildOptions fixture_store_options() {
  return {kFixtureChunkSize, kFixtureChunkOverlap, 5000};
}

inline std::string fixture_corpus_jsonl() {
  std::string out;
  for (const auto& pub : fixture_corpus()) {
    out += nlohmann::json{{"pub_id", pub.pub_id},
                          {"title", pub.title},
                          {"abstract", pub.abstract},
                          {"full_text", pub.full_text}}
               .dump();
    out += '\n';
  }
  return out;
}

}  // namespace villa::testing
