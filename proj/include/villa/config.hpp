#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "villa/experiment.hpp"
#include "villa/pipeline.hpp"

namespace villa {

struct Config {
  RetrievalConfig retrieval;
  std::size_t chunk_size = 1000;
  std::size_t chunk_overlap = 100;
  std::size_t abstract_size = 5000;
  std::size_t iterations = 5;
  std::string virus = "influenza A";
  QueryMode query_mode = QueryMode::Prompt;
  std::size_t jobs = 1;
  std::string embedder = "mock:7:256";
  std::string responder = "mock:oracle";
  StdKind std_kind = StdKind::Population;
};

using ConfigValues = std::map<std::string, std::string>;

/// Every key accepted in a config file or as an override.
const std::vector<std::string>& config_keys();

/// TOML-style `key = value` lines; `#` starts a comment; string values may
/// be double-quoted. Throws ParseError with the line number on bad syntax,
/// InvalidParameters on an unknown key (listing the valid ones).
ConfigValues parse_config_text(std::string_view text);

/// Applies `values` on top of `base`, then validates the result.
Config apply_config(Config base, const ConfigValues& values);

/// Defaults, overridden by the file (if any), overridden by `overrides`.
Config load_config(const std::optional<std::filesystem::path>& path,
                   const ConfigValues& overrides = {});

void validate(const Config& config);

}  // namespace villa
