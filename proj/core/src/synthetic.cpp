#include "hptr/synthetic.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "hptr/error.hpp"

namespace hptr {

std::vector<int> random_tree(int n, std::mt19937_64& rng) {
  if (n < 1) throw UsageError("tree size must be >= 1");
  // Attach words in random order, each to the root or an already placed word.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, k);
    const std::size_t j = pick(rng);
    heads[static_cast<std::size_t>(order[k] - 1)] = j == k ? 0 : order[j];
  }
  return heads;
}

namespace {
void grow(int lo, int hi, int parent, std::vector<int>& heads, std::mt19937_64& rng) {
  std::bernoulli_distribution cut(0.35);
  int a = lo;
  while (a <= hi) {
    int b = a;
    while (b < hi && !cut(rng)) ++b;
    std::uniform_int_distribution<int> pick(a, b);
    const int k = pick(rng);
    heads[static_cast<std::size_t>(k - 1)] = parent;
    grow(a, k - 1, k, heads, rng);
    grow(k + 1, b, k, heads, rng);
    a = b + 1;
  }
}
}  // namespace

std::vector<int> random_projective_tree(int n, std::mt19937_64& rng) {
  if (n < 1) throw UsageError("tree size must be >= 1");
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  grow(1, n, 0, heads, rng);
  return heads;
}

Sentence synthetic_sentence(std::span<const int> heads, std::span<const int> word_ids) {
  static constexpr std::array<const char*, 4> kTags{"NOUN", "VERB", "ADJ", "ADV"};
  static constexpr std::array<const char*, 4> kRels{"nsubj", "obj", "amod", "advmod"};
  Sentence s;
  for (std::size_t k = 0; k < heads.size(); ++k) {
    Token t;
    t.index = static_cast<int>(k) + 1;
    const int w = word_ids[k];
    t.form = "w" + std::to_string(w);
    t.upos = kTags[static_cast<std::size_t>(w) % kTags.size()];
    t.head = heads[k];
    if (t.head == 0)
      t.deprel = "root";
    else
      t.deprel = std::string(kRels[static_cast<std::size_t>(w) % kRels.size()]) + (t.head > t.index ? "" : ":r");
    s.tokens.push_back(std::move(t));
  }
  return s;
}

Treebank toy_treebank(int count, int max_len, int vocab_size, std::uint64_t seed, bool projective) {
  if (count < 0 || max_len < 1 || vocab_size < 1) throw UsageError("bad toy treebank parameters");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(1, max_len), word(0, vocab_size - 1);
  Treebank tb;
  for (int i = 0; i < count; ++i) {
    const int n = len(rng);
    const auto heads = projective ? random_projective_tree(n, rng) : random_tree(n, rng);
    std::vector<int> words(static_cast<std::size_t>(n));
    for (auto& w : words) w = word(rng);
    auto s = synthetic_sentence(heads, words);
    s.id = "toy-" + std::to_string(i + 1);
    tb.push_back(std::move(s));
  }
  return tb;
}

}  // namespace hptr
