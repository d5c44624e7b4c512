#include <doctest.h>

#include <cmath>
#include <random>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "hptr/error.hpp"
#include "hptr/eval.hpp"
#include "hptr/synthetic.hpp"
#include "hptr/train.hpp"

using namespace hptr;

namespace {
struct Known {
  std::string form;
  bool punct;
};
const std::vector<Known> kForms{{"dog", false}, {"Run", false}, {"x1", false},  {"é", false},   {"it's", false},
                                {",", true},    {".", true},    {"...", true},  {"-LRB-", true}, {"``", true},
                                {"''", true},   {"—", true},    {"?!", true},   {"“", true},     {"A.", false}};

// A random gold/pred pair where the ground truth of every count is recorded
// during generation.
struct Case {
  Treebank gold, pred;
  std::vector<std::vector<bool>> form_punct, upos_punct;
};

Case random_case(std::mt19937_64& rng, int sentences, int max_len) {
  Case c;
  for (int s = 0; s < sentences; ++s) {
    const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_len));
    Sentence g, p;
    g.id = p.id = "s" + std::to_string(s);
    std::vector<bool> fp, up;
    for (int k = 1; k <= n; ++k) {
      const auto& f = kForms[rng() % kForms.size()];
      Token t;
      t.index = k;
      t.form = f.form;
      t.upos = (rng() % 3 == 0) ? "PUNCT" : "NOUN";
      t.head = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
      t.deprel = (rng() % 2) ? "a" : "b";
      Token u = t;
      if (rng() % 3 == 0) u.head = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
      if (rng() % 3 == 0) u.deprel = (rng() % 2) ? "a" : "c";
      g.tokens.push_back(t);
      p.tokens.push_back(u);
      fp.push_back(f.punct);
      up.push_back(t.upos == "PUNCT");
    }
    c.gold.push_back(g);
    c.pred.push_back(p);
    c.form_punct.push_back(fp);
    c.upos_punct.push_back(up);
  }
  return c;
}
}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("figure 1 with one wrong head and one wrong label") {
    const auto gold = parse_conllu(fixtures::kFigure1);
    auto pred = gold;
    pred[0].tokens[1].head = 4;         // wrong head
    pred[0].tokens[4].deprel = "iobj";  // right head, wrong label
    const auto r = evaluate(gold, pred);
    CHECK(r.scored_tokens == 6);
    CHECK(r.correct_heads == 5);
    CHECK(r.correct_labeled == 4);
    CHECK(r.uas == doctest::Approx(5.0 / 6));
    CHECK(r.las == doctest::Approx(4.0 / 6));
    CHECK(r.length_bins[0].tokens == 6);
    CHECK(r.position_bins[0].tokens == 6);
    for (std::size_t b = 1; b < r.length_bins.size(); ++b) {
      CHECK(r.length_bins[b].empty());
      CHECK_FALSE(r.length_bins[b].uas().has_value());
    }
    const auto perfect = evaluate(gold, gold);
    CHECK(perfect.uas == 1.0);
    CHECK(perfect.las == 1.0);
  }

  TEST_CASE("punctuation forms") {
    for (const auto& k : kForms) {
      CAPTURE(k.form);
      CHECK(is_punctuation_form(k.form) == k.punct);
    }
    CHECK_FALSE(is_punctuation_form(""));
    CHECK(parse_punct_policy("ptb-style") == PunctPolicy::kPtbStyle);
    CHECK(to_string(PunctPolicy::kUposPunct) == "upos-punct");
    CHECK_THROWS_AS(parse_punct_policy("all"), UsageError);
  }

  TEST_CASE("random treebanks agree with a direct recount") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 200; ++trial) {
      const auto c = random_case(rng, 1 + static_cast<int>(rng() % 6), 60);
      for (auto policy : {PunctPolicy::kNone, PunctPolicy::kUposPunct, PunctPolicy::kPtbStyle}) {
        long tok = 0, uh = 0, lh = 0;
        std::map<int, long> by_len, by_pos;
        for (std::size_t s = 0; s < c.gold.size(); ++s)
          for (std::size_t k = 0; k < c.gold[s].size(); ++k) {
            const bool skip = (policy == PunctPolicy::kUposPunct && c.upos_punct[s][k]) ||
                              (policy == PunctPolicy::kPtbStyle && c.form_punct[s][k]);
            if (skip) continue;
            const auto& g = c.gold[s].tokens[k];
            const auto& p = c.pred[s].tokens[k];
            ++tok;
            uh += g.head == p.head;
            lh += g.head == p.head && g.deprel == p.deprel;
            const int n = static_cast<int>(c.gold[s].size());
            ++by_len[n <= 50 ? (n - 1) / 10 : 5];
            const int pos = static_cast<int>(k) + 1;
            ++by_pos[pos <= 50 ? (pos - 1) / 10 : 5];
          }
        const auto r = evaluate(c.gold, c.pred, policy);
        CHECK(r.scored_tokens == tok);
        CHECK(r.correct_heads == uh);
        CHECK(r.correct_labeled == lh);
        if (tok) CHECK(r.uas == doctest::Approx(static_cast<double>(uh) / tok));
        long len_sum = 0, pos_sum = 0, len_heads = 0, pos_heads = 0, len_lab = 0, pos_lab = 0;
        for (std::size_t b = 0; b < 6; ++b) {
          CHECK(r.length_bins[b].tokens == by_len[static_cast<int>(b)]);
          CHECK(r.position_bins[b].tokens == by_pos[static_cast<int>(b)]);
          len_sum += r.length_bins[b].tokens, pos_sum += r.position_bins[b].tokens;
          len_heads += r.length_bins[b].correct_heads, pos_heads += r.position_bins[b].correct_heads;
          len_lab += r.length_bins[b].correct_labeled, pos_lab += r.position_bins[b].correct_labeled;
        }
        CHECK(len_sum == tok);
        CHECK(pos_sum == tok);
        CHECK(len_heads == uh);
        CHECK(pos_heads == uh);
        CHECK(len_lab == lh);
        CHECK(pos_lab == lh);
      }
    }
  }

  TEST_CASE("bins") {
    const auto spec = BinSpec::parse("5,15");
    const auto bins = spec.make_bins();
    REQUIRE(bins.size() == 3);
    CHECK(bins[0].label() == "1-5");
    CHECK(bins[1].label() == "6-15");
    CHECK(bins[2].label() == ">15");
    CHECK(BinSpec{}.make_bins().back().label() == ">50");
    CHECK_THROWS_AS(BinSpec::parse("10,5"), UsageError);
    CHECK_THROWS_AS(BinSpec::parse("a"), UsageError);
  }

  TEST_CASE("misaligned inputs name the sentence") {
    const auto gold = parse_conllu(fixtures::kFigure1);
    auto pred = gold;
    pred[0].tokens.pop_back();
    try {
      evaluate(gold, pred);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("fig1") != std::string::npos);
    }
    CHECK_THROWS_AS(evaluate(gold, Treebank{}), DataError);
    auto renamed = gold;
    renamed[0].id = "other";
    CHECK_THROWS_AS(evaluate(gold, renamed), DataError);
  }

  TEST_CASE("token-budget sampling") {
    const auto tb = toy_treebank(50, 12, 10, 2);
    const auto idx = sample_sentence_indices(tb, 100, 7);
    CHECK(idx == sample_sentence_indices(tb, 100, 7));
    CHECK(idx != sample_sentence_indices(tb, 100, 8));
    std::set<std::size_t> uniq(idx.begin(), idx.end());
    CHECK(uniq.size() == idx.size());
    long tokens = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k + 1 == idx.size()) CHECK(tokens < 100);
      tokens += static_cast<long>(tb[idx[k]].size());
    }
    CHECK(tokens >= 100);
    const auto sample = sample_tokens(tb, 100, 7);
    REQUIRE(sample.size() == idx.size());
    CHECK(sample[0] == tb[idx[0]]);
    CHECK(sample_tokens(tb, 1000000, 1).size() == tb.size());
    CHECK_THROWS_AS(sample_tokens(tb, 0, 1), UsageError);
  }

  TEST_CASE("report formats") {
    const auto gold = parse_conllu(fixtures::kFigure1);
    const auto r = evaluate(gold, gold, PunctPolicy::kUposPunct);
    const nlohmann::json j = r;
    CHECK(j.at("uas") == 1.0);
    CHECK(j.at("punct_policy") == "upos-punct");
    CHECK(j.at("length_bins").size() == 6);
    CHECK(j.at("length_bins")[1].at("uas").is_null());
    CHECK(report_tsv(r).find("uas\t") != std::string::npos);
    const auto plot = plot_data_tsv(r);
    CHECK(plot.rfind("kind\tbin\tlo\thi\ttokens\tuas\tlas\n", 0) == 0);
    CHECK(plot.find("length\t11-20\t11\t20\t0\t\t\n") != std::string::npos);
  }

  TEST_CASE("run aggregation") {
    const std::vector<double> two{94.0, 94.2};
    const auto a = aggregate_runs(two);
    CHECK(a.mean == doctest::Approx(94.1));
    CHECK(a.stddev == doctest::Approx(0.1));
    CHECK(a.runs == 2);
    CHECK(aggregate_runs(two, true).stddev == doctest::Approx(0.1 * std::sqrt(2.0)));
    CHECK_THROWS_AS(aggregate_runs(std::vector<double>{1.0}), DataError);
    CHECK(format_stddev(0.0312) == "±0.03");
    CHECK(format_stddev(1.5, 1) == "±1.5");
  }
}
