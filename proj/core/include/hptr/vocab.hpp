#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hptr/treebank.hpp"

namespace hptr {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;

// String <-> dense id map with PAD = 0 and UNK = 1 reserved.
class SymbolTable {
 public:
  SymbolTable();

  int add(std::string_view symbol);
  int id(std::string_view symbol) const;  // kUnkId when absent
  bool contains(std::string_view symbol) const;
  const std::string& symbol(int id) const { return symbols_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
};

struct Vocab {
  SymbolTable words, chars, pos, labels;
  std::vector<int> word_freq;  // indexed by word id; 0 for PAD/UNK

  // Built from training data only; unseen dev/test symbols map to UNK.
  static Vocab build(std::span<const Sentence> train);
  int frequency(int word_id) const { return word_freq.at(static_cast<std::size_t>(word_id)); }
};

void to_json(nlohmann::json& j, const Vocab& v);
void from_json(const nlohmann::json& j, Vocab& v);

// UTF-8 code points of `s` as separate strings. Invalid bytes become single-byte symbols.
std::vector<std::string> utf8_chars(std::string_view s);

// Sentence mapped through a Vocab. Vectors have one entry per token.
struct EncodedSentence {
  std::vector<int> words, pos, labels, heads;
  std::vector<std::vector<int>> chars;

  int size() const { return static_cast<int>(words.size()); }
};

EncodedSentence encode_sentence(const Vocab& vocab, const Sentence& s, int max_word_chars = 64);

}  // namespace hptr
