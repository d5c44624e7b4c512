#include "hptr/eval.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hptr/error.hpp"
#include "hptr/vocab.hpp"

namespace hptr {

std::string_view to_string(PunctPolicy p) {
  switch (p) {
    case PunctPolicy::kNone: return "none";
    case PunctPolicy::kUposPunct: return "upos-punct";
    case PunctPolicy::kPtbStyle: return "ptb-style";
  }
  return "?";
}

PunctPolicy parse_punct_policy(std::string_view s) {
  for (auto p : {PunctPolicy::kNone, PunctPolicy::kUposPunct, PunctPolicy::kPtbStyle})
    if (s == to_string(p)) return p;
  throw UsageError("unknown punctuation policy '" + std::string(s) + "'");
}

bool is_punctuation_form(std::string_view form) {
  static constexpr std::array<std::string_view, 8> kBrackets{"-LRB-", "-RRB-", "-LCB-", "-RCB-",
                                                             "-LSB-", "-RSB-", "``", "''"};
  if (form.empty()) return false;
  if (std::find(kBrackets.begin(), kBrackets.end(), form) != kBrackets.end()) return true;
  static constexpr std::array<std::string_view, 12> kUnicode{"‘", "’", "“", "”", "–", "—",
                                                             "…", "«", "»", "、", "。", "，"};
  for (const auto& ch : utf8_chars(form)) {
    if (ch.size() == 1) {
      if (!std::ispunct(static_cast<unsigned char>(ch[0]))) return false;
    } else if (std::find(kUnicode.begin(), kUnicode.end(), ch) == kUnicode.end()) {
      return false;
    }
  }
  return true;
}

bool is_scored(const Token& t, PunctPolicy policy) {
  switch (policy) {
    case PunctPolicy::kNone: return true;
    case PunctPolicy::kUposPunct: return t.upos != "PUNCT";
    case PunctPolicy::kPtbStyle: return !is_punctuation_form(t.form);
  }
  return true;
}

std::string BinStats::label() const {
  if (!hi) return ">" + std::to_string(lo - 1);
  return std::to_string(lo) + "-" + std::to_string(*hi);
}

std::optional<double> BinStats::uas() const {
  if (tokens == 0) return std::nullopt;
  return static_cast<double>(correct_heads) / static_cast<double>(tokens);
}

std::optional<double> BinStats::las() const {
  if (tokens == 0) return std::nullopt;
  return static_cast<double>(correct_labeled) / static_cast<double>(tokens);
}

std::vector<BinStats> BinSpec::make_bins() const {
  std::vector<BinStats> bins;
  int lo = 1;
  for (int edge : upper_edges) {
    if (edge < lo) throw UsageError("bin edges must be strictly increasing positive integers");
    bins.push_back({lo, edge});
    lo = edge + 1;
  }
  bins.push_back({lo, std::nullopt});
  return bins;
}

BinSpec BinSpec::parse(std::string_view comma_separated) {
  BinSpec spec;
  spec.upper_edges.clear();
  std::stringstream ss{std::string(comma_separated)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      spec.upper_edges.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad bin edge '" + item + "'");
    }
  }
  spec.make_bins();  // validates
  return spec;
}

namespace {
BinStats& bin_for(std::vector<BinStats>& bins, int value) {
  for (auto& b : bins)
    if (!b.hi || value <= *b.hi) return b;
  return bins.back();
}

std::string name_of(const Sentence& s, std::size_t i) { return s.id ? *s.id : "#" + std::to_string(i + 1); }
}  // namespace

EvalReport evaluate(std::span<const Sentence> gold, std::span<const Sentence> pred, PunctPolicy policy,
                    const BinSpec& bins) {
  if (gold.size() != pred.size())
    throw DataError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                    std::to_string(pred.size()));
  EvalReport r;
  r.policy = policy;
  r.sentences = static_cast<long>(gold.size());
  r.length_bins = bins.make_bins();
  r.position_bins = bins.make_bins();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& g = gold[i];
    const auto& p = pred[i];
    if (g.size() != p.size())
      throw DataError("sentence " + name_of(g, i) + ": gold has " + std::to_string(g.size()) +
                      " tokens, prediction has " + std::to_string(p.size()));
    if (g.id && p.id && *g.id != *p.id)
      throw DataError("sentence " + name_of(g, i) + " is aligned with prediction " + *p.id);
    const int n = static_cast<int>(g.size());
    auto& len_bin = bin_for(r.length_bins, n);
    for (int k = 0; k < n; ++k) {
      const auto& gt = g.tokens[static_cast<std::size_t>(k)];
      const auto& pt = p.tokens[static_cast<std::size_t>(k)];
      if (!is_scored(gt, policy)) continue;
      const bool head_ok = gt.head == pt.head;
      const bool label_ok = head_ok && gt.deprel == pt.deprel;
      for (BinStats* b : {&len_bin, &bin_for(r.position_bins, k + 1)}) {
        ++b->tokens;
        b->correct_heads += head_ok;
        b->correct_labeled += label_ok;
      }
      ++r.scored_tokens;
      r.correct_heads += head_ok;
      r.correct_labeled += label_ok;
    }
  }
  if (r.scored_tokens > 0) {
    r.uas = static_cast<double>(r.correct_heads) / static_cast<double>(r.scored_tokens);
    r.las = static_cast<double>(r.correct_labeled) / static_cast<double>(r.scored_tokens);
  }
  return r;
}

std::vector<std::size_t> sample_sentence_indices(std::span<const Sentence> tb, long budget, std::uint64_t seed) {
  if (budget < 1) throw UsageError("token budget must be >= 1");
  std::vector<std::size_t> order(tb.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  long tokens = 0;
  std::size_t taken = 0;
  while (taken < order.size() && tokens < budget) tokens += static_cast<long>(tb[order[taken++]].size());
  order.resize(taken);
  return order;
}

Treebank sample_tokens(std::span<const Sentence> tb, long budget, std::uint64_t seed) {
  Treebank out;
  for (std::size_t i : sample_sentence_indices(tb, budget, seed)) out.push_back(tb[i]);
  return out;
}

namespace {
nlohmann::json bins_json(const std::vector<BinStats>& bins) {
  auto arr = nlohmann::json::array();
  for (const auto& b : bins) {
    nlohmann::json j{{"bin", b.label()}, {"lo", b.lo}, {"tokens", b.tokens}};
    j["hi"] = b.hi ? nlohmann::json(*b.hi) : nlohmann::json(nullptr);
    j["uas"] = b.uas() ? nlohmann::json(*b.uas()) : nlohmann::json(nullptr);
    j["las"] = b.las() ? nlohmann::json(*b.las()) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}
}  // namespace

void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"punct_policy", std::string(to_string(r.policy))},
                     {"sentences", r.sentences},
                     {"scored_tokens", r.scored_tokens},
                     {"correct_heads", r.correct_heads},
                     {"correct_labeled", r.correct_labeled},
                     {"uas", r.uas},
                     {"las", r.las},
                     {"length_bins", bins_json(r.length_bins)},
                     {"position_bins", bins_json(r.position_bins)}};
}

std::string report_tsv(const EvalReport& r) {
  std::ostringstream os;
  os << "metric\tvalue\n";
  os << "punct_policy\t" << to_string(r.policy) << '\n';
  os << "sentences\t" << r.sentences << '\n';
  os << "scored_tokens\t" << r.scored_tokens << '\n';
  os << "uas\t" << fmt(r.uas) << '\n';
  os << "las\t" << fmt(r.las) << '\n';
  return os.str();
}

std::string plot_data_tsv(const EvalReport& r) {
  std::ostringstream os;
  os << "kind\tbin\tlo\thi\ttokens\tuas\tlas\n";
  auto rows = [&](const char* kind, const std::vector<BinStats>& bins) {
    for (const auto& b : bins) {
      os << kind << '\t' << b.label() << '\t' << b.lo << '\t' << (b.hi ? std::to_string(*b.hi) : "") << '\t'
         << b.tokens << '\t' << (b.uas() ? fmt(*b.uas()) : "") << '\t' << (b.las() ? fmt(*b.las()) : "") << '\n';
    }
  };
  rows("length", r.length_bins);
  rows("position", r.position_bins);
  return os.str();
}

}  // namespace hptr
