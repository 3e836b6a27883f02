#include <doctest.h>

#include "compparse/conllu.h"

using namespace compparse;

namespace {

std::string line(int id, const std::string& form, const std::string& upos, const std::string& head,
                 const std::string& rel) {
  return std::to_string(id) + "\t" + form + "\t_\t" + upos + "\t_\t_\t" + head + "\t" + rel +
         "\t_\t_\n";
}

}  // namespace

TEST_CASE("two-token sentence is read field by field") {
  const auto text = line(1, "He", "PRON", "2", "nsubj") + line(2, "runs", "VERB", "0", "root") + "\n";
  const auto tb = parse_conllu(text);
  REQUIRE(tb.size() == 1);
  const auto& s = tb.sentences[0];
  REQUIRE(s.size() == 2);
  CHECK(s.tokens[0].form == "He");
  CHECK(*s.tokens[0].head == 2);
  CHECK(*s.tokens[0].deprel == "nsubj");
  CHECK(*s.tokens[0].upos == "PRON");
  CHECK(s.tokens[1].form == "runs");
  CHECK(*s.tokens[1].head == 0);
  CHECK(*s.tokens[1].deprel == "root");
  CHECK(s.heads() == std::vector<int>{-1, 2, 0});
}

TEST_CASE("writer emits one line per token and a blank separator") {
  const auto text = line(1, "He", "PRON", "2", "nsubj") + line(2, "runs", "VERB", "0", "root") + "\n";
  const auto out = write_conllu(parse_conllu(text));
  CHECK(std::count(out.begin(), out.end(), '\n') == 3);
  CHECK(out.substr(out.size() - 2) == "\n\n");
  CHECK(parse_conllu(out).sentences == parse_conllu(text).sentences);
}

TEST_CASE("multiword ranges, empty nodes and comments") {
  const std::string text = "# text = du lait\n1-2\tdu\t_\t_\t_\t_\t_\t_\t_\t_\n" +
                           line(1, "de", "ADP", "3", "case") + line(2, "le", "DET", "3", "det") +
                           "2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n" + line(3, "lait", "NOUN", "0", "root");
  const auto tb = parse_conllu(text);
  REQUIRE(tb.size() == 1);
  CHECK(tb.sentences[0].size() == 3);
  CHECK(tb.sentences[0].comments.size() == 1);
}

TEST_CASE("malformed input names sentence and line") {
  SUBCASE("wrong column count") {
    try {
      parse_conllu(line(1, "a", "X", "0", "root") + "\n2\tb\t_\n");
      FAIL("expected an error");
    } catch (const ConlluError& e) {
      CHECK(e.sentence() == 2);
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("cycle") {
    CHECK_THROWS_WITH_AS(parse_conllu(line(1, "a", "X", "2", "dep") + line(2, "b", "X", "1", "dep")),
                         doctest::Contains("cyclic"), ConlluError);
  }
  SUBCASE("self loop and range") {
    CHECK_THROWS_AS(parse_conllu(line(1, "a", "X", "1", "dep")), ConlluError);
    CHECK_THROWS_AS(parse_conllu(line(1, "a", "X", "5", "dep")), ConlluError);
  }
  SUBCASE("non-integer head") {
    CHECK_THROWS_AS(parse_conllu(line(1, "a", "X", "x", "dep")), ConlluError);
  }
  SUBCASE("mixed head presence") {
    CHECK_THROWS_AS(parse_conllu(line(1, "a", "X", "0", "root") + line(2, "b", "X", "_", "_")),
                    ConlluError);
  }
}

TEST_CASE("unannotated input is accepted") {
  const auto tb = parse_conllu(line(1, "a", "_", "_", "_") + line(2, "b", "_", "_", "_"));
  CHECK_FALSE(tb.sentences[0].has_heads());
  CHECK_FALSE(tb.sentences[0].tokens[0].upos.has_value());
}

TEST_CASE("characters are decoded from UTF-8") {
  CHECK(decode_utf8("año") == U"año");
  CHECK(decode_utf8("日本") == U"日本");
  CHECK(decode_utf8("\xff").size() == 1);
}

TEST_CASE("relation subtypes are stripped") {
  CHECK(universal_relation("nmod:poss") == "nmod");
  CHECK(universal_relation("obj") == "obj");
}

TEST_CASE("headedness over content relations") {
  // nsubj: head to the right; obj: head to the left; case: ignored.
  const auto text = line(1, "she", "PRON", "2", "nsubj") + line(2, "saw", "VERB", "0", "root") +
                    line(3, "at", "ADP", "4", "case") + line(4, "it", "PRON", "2", "obj");
  const auto st = treebank_stats(parse_conllu(text));
  REQUIRE(st.right_headedness.has_value());
  CHECK(*st.right_headedness == doctest::Approx(0.5));
  CHECK(*st.left_headedness == doctest::Approx(0.5));
  CHECK(st.content_arc_count == 2);
  CHECK(st.nonprojective_arc_fraction == 0.0);
}

TEST_CASE("average depth of a chain") {
  const auto text = line(1, "a", "X", "0", "root") + line(2, "b", "X", "1", "dep") +
                    line(3, "c", "X", "2", "dep");
  CHECK(treebank_stats(parse_conllu(text)).avg_arc_depth == doctest::Approx(2.0));
  CHECK(arc_depths({-1, 0, 1, 2}) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("no content relations leaves headedness undefined") {
  const auto text = line(1, "a", "X", "0", "root") + line(2, "b", "X", "1", "punct");
  const auto st = treebank_stats(parse_conllu(text));
  CHECK_FALSE(st.right_headedness.has_value());
  CHECK_THROWS_AS(treebank_stats(Treebank{}), std::invalid_argument);
}

TEST_CASE("crossing arcs are detected") {
  // 1 <- 3, 2 <- 4: arcs (3,1) and (4,2) cross.
  const std::vector<int> heads{-1, 3, 4, 0, 3};
  const auto c = crossed_arcs(heads);
  CHECK(c[1]);
  CHECK(c[2]);
  CHECK(tree_violation(heads).empty());
  CHECK(tree_violation({-1, 2, 1}) == "cyclic tree");
}
