#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hptr/treebank.hpp"

namespace hptr {

enum class PunctPolicy { kNone, kUposPunct, kPtbStyle };

std::string_view to_string(PunctPolicy p);
PunctPolicy parse_punct_policy(std::string_view s);  // "none" | "upos-punct" | "ptb-style"

// Whether a form consists solely of punctuation (ASCII punctuation, common
// Unicode quotes/dashes/ellipsis, and PTB bracket tokens like -LRB-).
bool is_punctuation_form(std::string_view form);
bool is_scored(const Token& t, PunctPolicy policy);

struct BinStats {
  int lo = 1;
  std::optional<int> hi;  // absent = open-ended
  long tokens = 0;
  long correct_heads = 0;
  long correct_labeled = 0;

  std::string label() const;  // "1-10", ">50"
  bool empty() const { return tokens == 0; }
  std::optional<double> uas() const;
  std::optional<double> las() const;
};

// Upper edges {10,20,30,40,50} give bins 1-10, 11-20, ..., 41-50, >50.
struct BinSpec {
  std::vector<int> upper_edges{10, 20, 30, 40, 50};

  std::vector<BinStats> make_bins() const;
  static BinSpec parse(std::string_view comma_separated);
};

struct EvalReport {
  PunctPolicy policy = PunctPolicy::kNone;
  long sentences = 0;
  long scored_tokens = 0;
  long correct_heads = 0;
  long correct_labeled = 0;
  double uas = 0.0;
  double las = 0.0;
  std::vector<BinStats> length_bins;    // by sentence length
  std::vector<BinStats> position_bins;  // by word position in its sentence
};

// Sentences must align one-to-one with equal token counts; throws DataError
// naming the offending sentence otherwise. Label comparison is on strings.
EvalReport evaluate(std::span<const Sentence> gold, std::span<const Sentence> pred,
                    PunctPolicy policy = PunctPolicy::kNone, const BinSpec& bins = {});

// Whole sentences drawn in seeded random order until the token count first
// reaches `budget`. Returned in the drawn order.
Treebank sample_tokens(std::span<const Sentence> tb, long budget, std::uint64_t seed);
// Indices of the sentences sample_tokens would pick, in the same order.
std::vector<std::size_t> sample_sentence_indices(std::span<const Sentence> tb, long budget, std::uint64_t seed);

void to_json(nlohmann::json& j, const EvalReport& r);
// metric/value rows.
std::string report_tsv(const EvalReport& r);
// kind, bin, lo, hi, tokens, uas, las rows; empty bins keep blank accuracies.
std::string plot_data_tsv(const EvalReport& r);

}  // namespace hptr
