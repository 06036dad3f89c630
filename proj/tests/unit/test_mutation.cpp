#include <doctest.h>

#include <random>

#include "villa/mutation.hpp"

using namespace villa;

TEST_SUITE("mutation") {

TEST_CASE("parse examples") {
  CHECK(parse_mutation("A123C") == Mutation{'A', 123, 'C'});
  CHECK(parse_mutation(" e627k ") == Mutation{'E', 627, 'K'});
  CHECK(normalize(Mutation{'A', 123, 'C'}) == "A123C");
  CHECK(normalize(parse_mutation("a007c")) == "A7C");
  CHECK(parse_mutation("A007C") == parse_mutation("A7C"));
}

TEST_CASE("synonymous substitutions are accepted") {
  const Mutation m = parse_mutation("A123A");
  CHECK(is_synonymous(m));
  CHECK_FALSE(is_synonymous(parse_mutation("A123C")));
}

TEST_CASE("errors carry the offending span") {
  auto span_of = [](const std::string& s) {
    try {
      parse_mutation(s);
    } catch (const MutationParseError& e) {
      return std::pair{e.span_begin(), e.span_end()};
    }
    FAIL("accepted " << s);
    return std::pair<std::size_t, std::size_t>{0, 0};
  };
  CHECK(span_of("627K") == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(span_of("E627") == std::pair<std::size_t, std::size_t>{4, 4});
  CHECK(span_of("E627KK").first == 5);
  CHECK(span_of("E6 27K").first == 2);
  CHECK(span_of("B627K") == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("deletions and insertions are rejected") {
  for (const char* s : {"\xce\x94" "123", "123del", "E627del", "ins123A", "E627_K628insA"}) {
    CHECK_THROWS_AS(parse_mutation(s), MutationParseError);
  }
}

TEST_CASE("accepts exactly letter digits letter") {
  // Mutate valid strings one character at a time and compare with a
  // direct membership oracle.
  const std::string residues = "ACDEFGHIKLMNPQRSTVWYX";
  auto oracle = [&](std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return false;
    s = s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
    if (s.size() < 3) return false;
    auto up = [](char c) { return char(std::toupper(static_cast<unsigned char>(c))); };
    if (residues.find(up(s.front())) == std::string::npos || residues.find(up(s.back())) == std::string::npos)
      return false;
    const std::string digits = s.substr(1, s.size() - 2);
    if (digits.empty()) return false;
    for (char c : digits)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    const std::string significant = digits.substr(std::min(digits.find_first_not_of('0'), digits.size()));
    if (significant.empty() || significant.size() > 10) return false;
    return std::stoull(significant) <= 0xffffffffULL;
  };
  std::mt19937_64 rng(99);
  const std::string noise = "ABZJ0159 -*xkq";
  int accepted = 0, rejected = 0;
  for (int i = 0; i < 5000; ++i) {
    std::string s = std::string(1, residues[rng() % residues.size()]) + std::to_string(rng() % 2000) +
                    residues[rng() % residues.size()];
    const int edits = int(rng() % 3);
    for (int e = 0; e < edits; ++e) {
      const std::size_t at = rng() % (s.size() + 1);
      switch (rng() % 3) {
        case 0: s.insert(s.begin() + at, noise[rng() % noise.size()]); break;
        case 1: if (at < s.size()) s.erase(at, 1); break;
        default: if (at < s.size()) s[at] = noise[rng() % noise.size()]; break;
      }
    }
    bool ok = true;
    try {
      parse_mutation(s);
    } catch (const MutationParseError&) {
      ok = false;
    }
    INFO("input: '" << s << "'");
    CHECK(ok == oracle(s));
    (ok ? accepted : rejected)++;
  }
  CHECK(accepted > 500);
  CHECK(rejected > 500);
}

TEST_CASE("canonical keys follow equality") {
  const MutationSet set{parse_mutation("E627K"), parse_mutation("e0627k"), parse_mutation("D701N")};
  CHECK(set.size() == 2);
  CHECK(canonical_keys(set) == std::set<std::string>{"D701N", "E627K"});
}

}
