#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hptr/error.hpp"
#include "hptr/synthetic.hpp"
#include "hptr/treebank.hpp"
#include "oracles.hpp"

using namespace hptr;

namespace {
Sentence from_heads(const std::vector<int>& heads) {
  std::vector<int> words(heads.size(), 0);
  return synthetic_sentence(heads, words);
}
}  // namespace

TEST_SUITE("treebank") {
  TEST_CASE("figure 1 sentence parses") {
    const auto tb = parse_conllu(fixtures::kFigure1);
    REQUIRE(tb.size() == 1);
    const auto t = tree_of(tb[0]);
    CHECK(t.heads == std::vector<int>{4, 3, 1, 0, 4, 4});
    CHECK(t.labels == std::vector<std::string>{"nsubj", "cc", "conj", "root", "obj", "advmod"});
    CHECK(tb[0].id == "fig1");
    CHECK(tb[0].tokens[0].form == "John");
    CHECK(tb[0].tokens[3].xpos == "VBP");
  }

  TEST_CASE("empty input gives no sentences") {
    CHECK(parse_conllu("").empty());
    CHECK(write_conllu({}).empty());
  }

  TEST_CASE("malformed lines report their line number") {
    const std::string nine = "# c\n1\tJohn\tJohn\tPROPN\tNNP\t_\t0\troot\t_\n";
    try {
      parse_conllu(nine);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_conllu("1\tJohn\t_\tX\t_\t_\tzero\troot\t_\t_\n"), ParseError);
    try {
      parse_conllu("1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n2\tb\t_\tX\t_\t_\t7\tdep\t_\t_\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("round trip") {
    const auto tb = parse_conllu(fixtures::kFigure1);
    const auto text = write_conllu(tb);
    CHECK(parse_conllu(text) == tb);
    CHECK(text == fixtures::kFigure1);
  }

  TEST_CASE("missing lemma is written as underscore") {
    auto tb = parse_conllu(fixtures::kFigure1);
    tb[0].tokens[0].lemma.reset();
    const auto text = write_conllu(tb);
    CHECK(text.find("1\tJohn\t_\tPROPN") != std::string::npos);
  }

  TEST_CASE("multiword tokens and empty nodes are kept but not parsed") {
    const std::string text =
        "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "1\tde\tde\tADP\t_\t_\t2\tcase\t_\t_\n"
        "2\tel\tel\tDET\t_\t_\t0\troot\t_\t_\n"
        "2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "\n";
    const auto tb = parse_conllu(text);
    REQUIRE(tb.size() == 1);
    CHECK(tb[0].size() == 2);
    CHECK(tb[0].passthrough.size() == 2);
    CHECK(write_conllu(tb) == text);
  }

  TEST_CASE("validate_tree examples") {
    CHECK(validate_tree(std::vector<int>{4, 3, 1, 0, 4, 4}).ok());
    const auto cyc = validate_tree(std::vector<int>{2, 1});
    CHECK(cyc.kind == TreeViolation::kCycle);
    CHECK(cyc.nodes == std::vector<int>{1, 2});
    CHECK(validate_tree(std::vector<int>{0, 0}).ok());
    CHECK(validate_tree(std::vector<int>{1}).kind == TreeViolation::kSelfLoop);
    CHECK(validate_tree(std::vector<int>{3}).kind == TreeViolation::kHeadOutOfRange);
  }

  TEST_CASE("validate_tree agrees with head-chain walking for n <= 5") {
    long checked = 0;
    for (int n = 1; n <= 5; ++n) {
      oracle::for_each_head_array(n, [&](const std::vector<int>& heads) {
        ++checked;
        REQUIRE(validate_tree(heads).ok() == oracle::valid_tree(heads));
      });
    }
    CHECK(checked == 2 + 9 + 64 + 625 + 7776);
  }

  TEST_CASE("is_projective examples") {
    CHECK(is_projective(std::vector<int>{4, 3, 1, 0, 4, 4}));
    CHECK_FALSE(is_projective(std::vector<int>{3, 1, 0, 2}));
    CHECK(is_projective(std::vector<int>{0}));
    CHECK(arcs_cross(1, 3, 2, 4));
    CHECK_FALSE(arcs_cross(1, 3, 3, 4));
  }

  TEST_CASE("is_projective agrees with all-pairs and descendant checks for n <= 6") {
    long trees = 0;
    for (int n = 1; n <= 6; ++n) {
      oracle::for_each_head_array(n, [&](const std::vector<int>& heads) {
        if (!oracle::valid_tree(heads)) return;
        ++trees;
        const bool p = is_projective(heads);
        REQUIRE(p == oracle::projective_all_pairs(heads));
        REQUIRE(p == oracle::projective_by_descendants(heads));
      });
    }
    CHECK(trees == 1 + 3 + 16 + 125 + 1296 + 16807);  // (n+1)^(n-1)
  }

  TEST_CASE("arc statistics") {
    const auto fig = parse_conllu(fixtures::kFigure1);
    const auto s = arc_stats(fig);
    CHECK(s.long_arc_count == 0);
    CHECK(s.pct_long_arcs == 0.0);
    CHECK_FALSE(s.pct_left_of_long.has_value());

    // Arc 6->1 has length 5; the root arc to word 6 has length 6 and points right.
    const Treebank star{from_heads({6, 6, 6, 6, 6, 0})};
    const auto with_root = arc_stats(star);
    CHECK(with_root.long_arc_count == 2);
    CHECK(with_root.pct_long_arcs == doctest::Approx(2.0 / 6.0));
    CHECK(*with_root.pct_left_of_long == doctest::Approx(0.5));
    const auto without_root = arc_stats(star, false);
    CHECK(without_root.pct_long_arcs == doctest::Approx(1.0 / 5.0));
    CHECK(*without_root.pct_left_of_long == doctest::Approx(1.0));

    const Treebank twice{star[0], star[0]};
    const auto dup = arc_stats(twice);
    CHECK(dup.pct_long_arcs == with_root.pct_long_arcs);
    CHECK(*dup.pct_left_of_long == *with_root.pct_left_of_long);

    CHECK_THROWS_AS(arc_stats(Treebank{}), DataError);
  }

  TEST_CASE("arc statistics match a direct recount") {
    std::mt19937_64 rng(5);
    Treebank tb;
    for (int i = 0; i < 50; ++i) tb.push_back(from_heads(random_tree(1 + static_cast<int>(rng() % 30), rng)));
    long arcs = 0, longs = 0, left = 0;
    for (const auto& s : tb)
      for (const auto& t : s.tokens) {
        ++arcs;
        if (std::abs(t.head - t.index) > 4) {
          ++longs;
          left += t.head > t.index;
        }
      }
    const auto st = arc_stats(tb);
    CHECK(st.long_arc_count == static_cast<std::size_t>(longs));
    CHECK(st.pct_long_arcs == doctest::Approx(static_cast<double>(longs) / arcs));
    CHECK(*st.pct_left_of_long == doctest::Approx(static_cast<double>(left) / longs));
  }

  TEST_CASE("file helpers") {
    const std::string path = "treebank_roundtrip.conllu";
    const auto tb = parse_conllu(fixtures::kFigure1);
    write_conllu_file(path, tb);
    CHECK(read_conllu_file(path) == tb);
    CHECK_THROWS_AS(read_conllu_file("does/not/exist.conllu"), DataError);
  }
}
