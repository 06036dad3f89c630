#include "villa/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "villa/errors.hpp"

namespace villa {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "abstract_size", "chunk_overlap", "chunk_size", "embedder", "iterations", "jobs",
      "k",             "k_a",           "k_c",        "query_mode", "responder", "std",
      "t",             "t_a",           "t_c",        "virus"};
  return keys;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void check_key(const std::string& key) {
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw InvalidParameters(
        fmt::format("unknown config key '{}'; valid keys: {}", key, fmt::join(keys, ", ")));
  }
}

std::size_t to_size(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidParameters(fmt::format("{} must be a non-negative integer, got '{}'", key, value));
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw InvalidParameters(fmt::format("{} must be a number, got '{}'", key, value));
  }
}

}  // namespace

ConfigValues parse_config_text(std::string_view text) {
  ConfigValues values;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(fmt::format("config line {}: expected 'key = value'", line_no), line_no);
    }
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else if (!value.empty() && (value.front() == '"' || value.back() == '"')) {
      throw ParseError(fmt::format("config line {}: unbalanced quote", line_no), line_no);
    }
    check_key(key);
    values[key] = std::string(value);
  }
  return values;
}

Config apply_config(Config c, const ConfigValues& values) {
  for (const auto& [key, value] : values) {
    check_key(key);
    if (key == "k") c.retrieval.k = to_size(key, value);
    else if (key == "t") c.retrieval.t = to_double(key, value);
    else if (key == "k_a") c.retrieval.k_a = to_size(key, value);
    else if (key == "t_a") c.retrieval.t_a = to_double(key, value);
    else if (key == "k_c") c.retrieval.k_c = to_size(key, value);
    else if (key == "t_c") c.retrieval.t_c = to_double(key, value);
    else if (key == "chunk_size") c.chunk_size = to_size(key, value);
    else if (key == "chunk_overlap") c.chunk_overlap = to_size(key, value);
    else if (key == "abstract_size") c.abstract_size = to_size(key, value);
    else if (key == "iterations") c.iterations = to_size(key, value);
    else if (key == "jobs") c.jobs = to_size(key, value);
    else if (key == "virus") c.virus = value;
    else if (key == "embedder") c.embedder = value;
    else if (key == "responder") c.responder = value;
    else if (key == "query_mode") c.query_mode = parse_query_mode(value);
    else if (key == "std") {
      if (value == "population") c.std_kind = StdKind::Population;
      else if (value == "sample") c.std_kind = StdKind::Sample;
      else throw InvalidParameters(fmt::format("std must be population or sample, got '{}'", value));
    }
  }
  validate(c);
  return c;
}

void validate(const Config& c) {
  c.retrieval.validate();
  if (c.chunk_size == 0) throw InvalidParameters("chunk_size must be >= 1");
  if (c.chunk_overlap >= c.chunk_size) {
    throw InvalidParameters(fmt::format("chunk_overlap ({}) must be smaller than chunk_size ({})",
                                        c.chunk_overlap, c.chunk_size));
  }
  if (c.abstract_size == 0) throw InvalidParameters("abstract_size must be >= 1");
  if (c.iterations == 0) throw InvalidParameters("iterations must be >= 1");
  if (c.jobs == 0) throw InvalidParameters("jobs must be >= 1");
  if (c.virus.empty()) throw InvalidParameters("virus must not be empty");
}

Config load_config(const std::optional<std::filesystem::path>& path, const ConfigValues& overrides) {
  ConfigValues merged;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(fmt::format("cannot open config '{}'", path->string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    merged = parse_config_text(buf.str());
  }
  for (const auto& [key, value] : overrides) merged[key] = value;
  return apply_config(Config{}, merged);
}

}  // namespace villa
