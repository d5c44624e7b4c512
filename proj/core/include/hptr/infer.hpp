#pragma once

#include <span>
#include <type_traits>
#include <vector>

#include "hptr/model.hpp"
#include "hptr/treebank.hpp"

namespace hptr {

// Optional external embeddings of one sentence; kept out of deduction so a
// literal nullptr works.
template <class T>
using ExtPtr = const std::type_identity_t<ad::Matrix<T>>*;

struct DecodeOptions {
  int beam = 1;  // 1 = greedy
  LegalityOptions legality;
};

struct ParseResult {
  DepTree tree;
  std::vector<int> actions;         // chosen parent per step, in focus order
  std::vector<double> step_log_probs;
  double log_prob = 0.0;            // sum of step_log_probs
};

// Highest-probability legal parent at every step; ties go to the smaller position.
template <class T>
ParseResult greedy_parse(const Model<T>& model, const EncodedSentence& s, ExtPtr<T> ext,
                         const LegalityOptions& legality = {});

// Each item is expanded by its top-k legal parents; the global top-k survive,
// ordered by cumulative log-probability and then by lexicographically smaller
// action history.
template <class T>
ParseResult beam_parse(const Model<T>& model, const EncodedSentence& s, ExtPtr<T> ext, int beam,
                       const LegalityOptions& legality = {});

template <class T>
ParseResult parse(const Model<T>& model, const EncodedSentence& s, ExtPtr<T> ext,
                  const DecodeOptions& opts) {
  return opts.beam <= 1 ? greedy_parse(model, s, ext, opts.legality)
                        : beam_parse(model, s, ext, opts.beam, opts.legality);
}

// Log-probability of a complete action sequence under the model (used to
// check search against exhaustive enumeration).
template <class T>
double sequence_log_prob(const Model<T>& model, const EncodedSentence& s, ExtPtr<T> ext,
                         std::span<const int> actions, const LegalityOptions& legality = {});

// Labels for a fixed head array: per-arc argmax over real labels (PAD/UNK excluded).
template <class T>
std::vector<std::string> predict_labels(const Model<T>& model, const EncodedSentence& s, ExtPtr<T> ext,
                                        std::span<const int> heads);

// Parses every sentence; `ext` is empty or has one matrix per sentence.
// Output order and content do not depend on `threads`.
template <class T>
Treebank parse_treebank(const Model<T>& model, std::span<const Sentence> tb,
                        std::type_identity_t<std::span<const ad::Matrix<T>>> ext, const DecodeOptions& opts, int threads = 1);

}  // namespace hptr
