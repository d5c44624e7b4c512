#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hptr/treebank.hpp"

namespace hptr {

enum class SystemKind { kL2R, kR2L, kOI };

std::string_view to_string(SystemKind kind);
SystemKind parse_system_kind(std::string_view s);  // "l2r" | "r2l" | "oi"

// A dependent already attached to some word: its position and the decoder
// step at which the attachment happened.
struct AttachedDependent {
  int position = 0;
  int step = 0;

  bool operator==(const AttachedDependent&) const = default;
};

// Leftmost, rightmost, last-attached left and last-attached right dependents.
struct DependentRecord {
  std::optional<AttachedDependent> lm, rm, la, ra;

  bool operator==(const DependentRecord&) const = default;
};

struct LegalityOptions {
  bool projective_only = false;
  bool single_root = false;
};

// Order in which words become the focus. L2R = 1..n, R2L = n..1,
// OI = 1, n, 2, n-1, ... ending at floor(n/2) + 1.
std::vector<int> focus_order(SystemKind kind, int n);

// p_t = gold head of the word focused at step t. Throws DataError on invalid trees.
std::vector<int> oracle_sequence(SystemKind kind, std::span<const int> gold_heads);

class ParserState {
 public:
  ParserState(SystemKind kind, int n);

  SystemKind kind() const { return kind_; }
  int size() const { return n_; }
  int step() const { return step_; }
  bool done() const { return step_ == n_; }
  int focus() const;
  std::span<const int> order() const { return order_; }
  // heads()[w-1] is the head of word w, or kUnattached.
  std::span<const int> heads() const { return heads_; }
  int head(int word) const { return heads_[word - 1]; }
  // Decoder step at which `word` was attached, or -1.
  int attach_step(int word) const { return attach_step_[word - 1]; }
  // Tracker entry for any position in [0, n]. Kept up to date for processed words too.
  const DependentRecord& record(int position) const { return tracker_[position]; }
  int root_children() const { return root_children_; }

  // Tracker record of the focus word, restricted to the sides this transition
  // system can have populated before the focus is processed.
  DependentRecord dependent_snapshot() const;

  bool is_legal(int parent, const LegalityOptions& opts = {}) const;
  // Ascending positions. Never empty while !done().
  std::vector<int> legal_parents(const LegalityOptions& opts = {}) const;
  // Throws UsageError naming the violated constraint.
  void apply_attach(int parent, const LegalityOptions& opts = {});

  static constexpr int kUnattached = -1;

 private:
  bool creates_cycle(int parent) const;
  bool crosses_built_arc(int parent) const;
  std::string illegal_reason(int parent, const LegalityOptions& opts) const;

  SystemKind kind_;
  int n_;
  int step_ = 0;
  std::vector<int> order_;
  std::vector<int> heads_;
  std::vector<int> attach_step_;
  std::vector<DependentRecord> tracker_;
  int root_children_ = 0;
};

// Whether a projective tree rooted at 0 exists in which every word with a
// fixed head keeps it (heads[w-1] != kUnattached). With `single_root`, the root
// must have exactly one child.
bool projective_completion_exists(std::span<const int> heads, bool single_root);

// For an unattached word `dep`: entry p (0..n) says whether attaching dep to p
// still admits such a completion. One inside-outside pass, O(n^3).
std::vector<char> projective_feasible_parents(std::span<const int> heads, int dep, bool single_root);

struct AvailabilityStats {
  double all_per_sentence = 0.0;
  double long_per_sentence = 0.0;
};

// Mean count, per sentence, of gold dependents already attached when their head
// becomes the focus. By default only the sides the system exposes are counted
// (left for L2R, right for R2L, both for OI).
AvailabilityStats availability_stats(SystemKind kind, std::span<const Sentence> tb,
                                     bool count_both_sides = false);

}  // namespace hptr
