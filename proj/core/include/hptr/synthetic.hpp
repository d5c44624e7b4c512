#pragma once

// Random trees and toy corpora for tests, benchmarks and smoke runs.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hptr/treebank.hpp"

namespace hptr {

// Valid (single-head, acyclic, rooted) head array of length n. Every tree has
// non-zero probability.
std::vector<int> random_tree(int n, std::mt19937_64& rng);
// Same, restricted to projective trees.
std::vector<int> random_projective_tree(int n, std::mt19937_64& rng);

// Sentence over `heads` with forms "w<k>", tags and labels derived from the
// forms and arc directions (so the labeler has something to learn).
Sentence synthetic_sentence(std::span<const int> heads, std::span<const int> word_ids);

// `count` sentences of length 1..max_len over a `vocab_size`-word vocabulary.
Treebank toy_treebank(int count, int max_len, int vocab_size, std::uint64_t seed, bool projective = false);

}  // namespace hptr
