#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hptr {

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::optional<std::string> lemma;
  std::string upos;
  std::optional<std::string> xpos;
  std::string feats = "_";
  int head = 0;  // 0 = artificial root
  std::string deprel;
  std::string deps = "_";
  std::optional<std::string> misc;

  bool operator==(const Token&) const = default;
};

// A line that is kept verbatim for round-trip but is not part of the parseable
// token sequence (multiword-token ranges "1-2" and empty nodes "1.1").
struct PassthroughLine {
  std::size_t before_token = 0;  // number of regular tokens preceding this line
  std::string text;

  bool operator==(const PassthroughLine&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::optional<std::string> id;       // from "# sent_id = ..."
  std::vector<std::string> comments;   // other comment lines, without the leading '#'
  std::vector<PassthroughLine> passthrough;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

using Treebank = std::vector<Sentence>;

// Head/label arrays of a sentence. heads[k] is the head of word k+1.
struct DepTree {
  std::vector<int> heads;
  std::vector<std::string> labels;

  std::size_t size() const { return heads.size(); }
  bool operator==(const DepTree&) const = default;
};

DepTree tree_of(const Sentence& s);
// Copies heads/labels of `tree` into a copy of `s`.
Sentence with_tree(Sentence s, const DepTree& tree);

// CoNLL-U (10 tab-separated columns). Throws ParseError naming the line.
Treebank parse_conllu(std::string_view text);
std::string write_conllu(std::span<const Sentence> sentences);

Treebank read_conllu_file(const std::string& path);
void write_conllu_file(const std::string& path, std::span<const Sentence> sentences);

enum class TreeViolation { kNone, kHeadOutOfRange, kSelfLoop, kCycle, kUnreachable };

struct TreeValidation {
  TreeViolation kind = TreeViolation::kNone;
  std::vector<int> nodes;  // the cycle, or the offending node(s)

  bool ok() const { return kind == TreeViolation::kNone; }
  std::string message() const;
};

TreeValidation validate_tree(std::span<const int> heads);
inline TreeValidation validate_tree(const Sentence& s) { return validate_tree(tree_of(s).heads); }

// Arcs (h, d) and (h', d') cross iff, normalized to (min, max), one strictly
// interleaves the other. The root arc is (0, d).
bool arcs_cross(int h1, int d1, int h2, int d2);
bool is_projective(std::span<const int> heads);

struct TreebankStats {
  std::size_t sentence_count = 0;
  std::size_t token_count = 0;
  std::size_t arc_count = 0;
  std::size_t long_arc_count = 0;
  std::size_t left_long_arc_count = 0;
  double pct_long_arcs = 0.0;
  std::optional<double> pct_left_of_long;  // undefined without long arcs
};

inline constexpr int kLongArcThreshold = 4;

// Arc length is |head - dependent|; root arcs count with length = dependent
// position unless `include_root_arcs` is false. Throws DataError on empty input.
TreebankStats arc_stats(std::span<const Sentence> tb, bool include_root_arcs = true);

}  // namespace hptr
