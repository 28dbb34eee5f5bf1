#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ptrsrl/conll.hpp"
#include "ptrsrl/error.hpp"
#include "support.hpp"

using namespace ptrsrl;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Sentence> parse(const std::string& text, std::vector<Warning>* w = nullptr) {
  std::istringstream in(text);
  return read_conll(in, w);
}

const char* kRow = "1\tx\tx\tx\tNN\tNN\t_\t_\t0\t0\tROOT\tROOT\t_\t_\n";

}  // namespace

TEST_CASE("example fixture parses into two frames") {
  const Sentence s = testing::example_sentence();
  REQUIRE(s.size() == 8);
  REQUIRE(s.frames.size() == 2);
  CHECK(s.tokens[2].fillpred);
  CHECK(s.tokens[2].pred == "manager.01");
  CHECK(s.tokens[3].pred == "say.01");
  const Frame& managers = s.frames[0];
  CHECK(managers.predicate == 3);
  CHECK(managers.sense == "01");
  REQUIRE(managers.args.size() == 2);
  CHECK(managers.args[0] == Argument{2, "A1"});
  CHECK(managers.args[1] == Argument{3, "A0"});
  CHECK(s.frames[1].args.size() == 3);
}

TEST_CASE("empty input gives no sentences and writes nothing") {
  CHECK(parse("").empty());
  CHECK(parse("\n\n").empty());
  CHECK(to_conll_string({}).empty());
}

TEST_CASE("normalized fixture round-trips byte for byte") {
  const std::string bytes = slurp(testing::data_path("normalized.conll"));
  REQUIRE(!bytes.empty());
  CHECK(to_conll_string(parse(bytes)) == bytes);
}

TEST_CASE("writing keeps verbatim columns and flags") {
  const std::string text = to_conll_string({testing::example_sentence()});
  CHECK(text.find("\tY\tmanager.01\t") != std::string::npos);
  CHECK(text.find("\tY\tsay.01\t") != std::string::npos);
  CHECK(text.substr(text.size() - 2) == "\n\n");
}

TEST_CASE("random sentences survive write then read") {
  std::mt19937_64 rng(11);
  std::vector<Sentence> corpus;
  for (int k = 0; k < 20; ++k) corpus.push_back(testing::random_sentence(rng, testing::uniform(rng, 1, 15)));
  const std::vector<Sentence> back = parse(to_conll_string(corpus));
  CHECK(back == corpus);
  for (const Sentence& s : back) {
    std::size_t flagged = 0;
    for (const Token& t : s.tokens) flagged += t.fillpred;
    CHECK(flagged == s.frames.size());
  }
}

TEST_CASE("CRLF endings are normalized") {
  std::string text = slurp(testing::data_path("example.conll"));
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  CHECK(parse(crlf) == parse(text));
}

TEST_CASE("multi-role cells split into separate arguments") {
  const auto corpus = parse(slurp(testing::data_path("normalized.conll")));
  const Frame& cafe = corpus.at(1).frames.at(0);
  REQUIRE(cafe.args.size() == 3);
  CHECK(cafe.args[1] == Argument{4, "A1"});
  CHECK(cafe.args[2] == Argument{4, "A2"});
}

TEST_CASE("malformed input raises positioned parse errors") {
  SUBCASE("too few columns") {
    try {
      parse("1\tx\tx\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("non-consecutive ids") {
    std::string two = std::string(kRow) + "3" + std::string(kRow).substr(1);
    try {
      parse(two);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("APRED count differs from predicate count") {
    std::string row = "1\tx\tx\tx\tNN\tNN\t_\t_\t0\t0\tROOT\tROOT\tY\tx.01\n";
    CHECK_THROWS_AS(parse(row), ParseError);
  }
  SUBCASE("comment line") { CHECK_THROWS_AS(parse("# sent_id 1\n" + std::string(kRow)), ParseError); }
  SUBCASE("duplicate role in a cell") {
    std::string row = "1\tx\tx\tx\tNN\tNN\t_\t_\t0\t0\tROOT\tROOT\tY\tx.01\tA0|A0\n";
    CHECK_THROWS_AS(parse(row), ParseError);
  }
  SUBCASE("bad FILLPRED value") {
    std::string row = "1\tx\tx\tx\tNN\tNN\t_\t_\t0\t0\tROOT\tROOT\tN\t_\n";
    CHECK_THROWS_AS(parse(row), ParseError);
  }
}

TEST_CASE("inconsistent predicate columns warn instead of failing") {
  std::vector<Warning> warnings;
  std::string row = "1\tx\tx\tx\tNN\tNN\t_\t_\t0\t0\tROOT\tROOT\tY\tbare\t_\n";
  const auto corpus = parse(row, &warnings);
  REQUIRE(corpus.size() == 1);
  CHECK(corpus[0].frames.at(0).sense == "bare");
  CHECK(split_pred("bare").first.empty());
  CHECK(warnings.size() == 1);
  warnings.clear();
  parse("1\tx\tx\tx\tNN\tNN\t_\t_\t0\t0\tROOT\tROOT\t_\tx.01\n", &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("split_pred uses the last separator") {
  CHECK(split_pred("manager.01") == std::pair<std::string, std::string>{"manager", "01"});
  CHECK(split_pred("U.S.02") == std::pair<std::string, std::string>{"U.S", "02"});
}

TEST_CASE("frames pointing outside the sentence are not serialized") {
  Sentence s = testing::example_sentence();
  s.frames[0].args.push_back({9, "A2"});
  CHECK_THROWS_AS(to_conll_string({s}), SerializationError);
}

TEST_CASE("strip_gold modes") {
  const Sentence s = testing::example_sentence();
  const Sentence keep = strip_gold(s, StripMode::kKeepPredicates);
  CHECK(keep.tokens[2].fillpred);
  CHECK(keep.tokens[3].fillpred);
  CHECK(keep.tokens[2].pred.empty());
  REQUIRE(keep.frames.size() == 2);
  CHECK(keep.frames[0].args.empty());
  const Sentence plain = strip_gold(s, StripMode::kPlainText);
  CHECK(plain.frames.empty());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK_FALSE(plain.tokens[k].fillpred);
    CHECK(plain.tokens[k].form == s.tokens[k].form);
    CHECK(plain.tokens[k].lemma == s.tokens[k].lemma);
    CHECK(keep.tokens[k].form == s.tokens[k].form);
  }
  CHECK(strip_gold(keep, StripMode::kKeepPredicates) == keep);
  CHECK(strip_gold(plain, StripMode::kPlainText) == plain);
  CHECK(parse(to_conll_string({keep})).at(0) == keep);
}
