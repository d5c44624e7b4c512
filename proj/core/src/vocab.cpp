#include "hptr/vocab.hpp"

#include <nlohmann/json.hpp>

#include "hptr/error.hpp"

namespace hptr {

SymbolTable::SymbolTable() {
  add("<pad>");
  add("<unk>");
}

int SymbolTable::add(std::string_view symbol) {
  auto it = ids_.find(std::string(symbol));
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(symbols_.size());
  symbols_.emplace_back(symbol);
  ids_.emplace(symbols_.back(), id);
  return id;
}

int SymbolTable::id(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  return it == ids_.end() ? kUnkId : it->second;
}

bool SymbolTable::contains(std::string_view symbol) const { return ids_.count(std::string(symbol)) != 0; }

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if ((c & 0xE0) == 0xC0)
      len = 2;
    else if ((c & 0xF0) == 0xE0)
      len = 3;
    else if ((c & 0xF8) == 0xF0)
      len = 4;
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

Vocab Vocab::build(std::span<const Sentence> train) {
  Vocab v;
  v.word_freq.assign(2, 0);
  for (const auto& s : train) {
    for (const auto& t : s.tokens) {
      const int w = v.words.add(t.form);
      if (w >= static_cast<int>(v.word_freq.size())) v.word_freq.resize(static_cast<std::size_t>(w) + 1, 0);
      ++v.word_freq[static_cast<std::size_t>(w)];
      for (const auto& ch : utf8_chars(t.form)) v.chars.add(ch);
      v.pos.add(t.upos);
      v.labels.add(t.deprel);
    }
  }
  return v;
}

void to_json(nlohmann::json& j, const Vocab& v) {
  j = nlohmann::json{{"words", v.words.symbols()},
                     {"chars", v.chars.symbols()},
                     {"pos", v.pos.symbols()},
                     {"labels", v.labels.symbols()},
                     {"word_freq", v.word_freq}};
}

namespace {
SymbolTable table_from(const nlohmann::json& arr) {
  SymbolTable t;
  const auto symbols = arr.get<std::vector<std::string>>();
  if (symbols.size() < 2) throw DataError("vocabulary table lacks reserved entries");
  for (std::size_t i = 2; i < symbols.size(); ++i) t.add(symbols[i]);
  if (t.size() != static_cast<int>(symbols.size())) throw DataError("vocabulary table has duplicates");
  return t;
}
}  // namespace

void from_json(const nlohmann::json& j, Vocab& v) {
  v.words = table_from(j.at("words"));
  v.chars = table_from(j.at("chars"));
  v.pos = table_from(j.at("pos"));
  v.labels = table_from(j.at("labels"));
  v.word_freq = j.at("word_freq").get<std::vector<int>>();
  if (static_cast<int>(v.word_freq.size()) != v.words.size()) throw DataError("word frequency table size mismatch");
}

EncodedSentence encode_sentence(const Vocab& vocab, const Sentence& s, int max_word_chars) {
  EncodedSentence e;
  for (const auto& t : s.tokens) {
    e.words.push_back(vocab.words.id(t.form));
    e.pos.push_back(vocab.pos.id(t.upos));
    e.labels.push_back(vocab.labels.id(t.deprel));
    e.heads.push_back(t.head);
    std::vector<int> chars;
    for (const auto& ch : utf8_chars(t.form)) {
      if (static_cast<int>(chars.size()) >= max_word_chars) break;
      chars.push_back(vocab.chars.id(ch));
    }
    e.chars.push_back(std::move(chars));
  }
  return e;
}

}  // namespace hptr
