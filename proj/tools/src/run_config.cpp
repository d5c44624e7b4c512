#include "run_config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "hptr/error.hpp"

namespace hptr::cli {

namespace {

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError("'" + key + "' expects an integer, got '" + v + "'");
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError("'" + key + "' expects a number, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("'" + key + "' expects true/false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      // hyper-parameter table names
      {"cnn-window-size", [](RunConfig& c, auto& k, auto& v) { c.model.char_window = to_int(k, v); }},
      {"cnn-number-of-filters", [](RunConfig& c, auto& k, auto& v) { c.model.char_filters = to_int(k, v); }},
      {"bilstm-encoder-layers", [](RunConfig& c, auto& k, auto& v) { c.model.encoder_layers = to_int(k, v); }},
      {"bilstm-encoder-size", [](RunConfig& c, auto& k, auto& v) { c.model.encoder_size = to_int(k, v); }},
      {"lstm-decoder-layers", [](RunConfig& c, auto& k, auto& v) { c.model.decoder_layers = to_int(k, v); }},
      {"lstm-decoder-size", [](RunConfig& c, auto& k, auto& v) { c.model.decoder_size = to_int(k, v); }},
      {"lstm-layers-dropout", [](RunConfig& c, auto& k, auto& v) { c.model.lstm_dropout = to_double(k, v); }},
      {"word-pos-char-embedding-dimension",
       [](RunConfig& c, auto& k, auto& v) { c.model.word_dim = c.model.pos_dim = c.model.char_dim = to_int(k, v); }},
      {"external-embedding-dimension", [](RunConfig& c, auto& k, auto& v) { c.model.ext_dim = to_int(k, v); }},
      {"embeddings-dropout", [](RunConfig& c, auto& k, auto& v) { c.model.embedding_dropout = to_double(k, v); }},
      {"mlp-layers", [](RunConfig& c, auto& k, auto& v) { c.model.mlp_layers = to_int(k, v); }},
      {"mlp-activation-function",
       [](RunConfig&, auto& k, auto& v) {
         std::string low = v;
         std::transform(low.begin(), low.end(), low.begin(), [](unsigned char ch) { return std::tolower(ch); });
         if (low != "elu") throw UsageError("'" + k + "' supports only elu");
       }},
      {"arc-mlp-size", [](RunConfig& c, auto& k, auto& v) { c.model.arc_mlp_size = to_int(k, v); }},
      {"label-mlp-size", [](RunConfig& c, auto& k, auto& v) { c.model.label_mlp_size = to_int(k, v); }},
      {"unk-replacement-probability",
       [](RunConfig& c, auto& k, auto& v) { c.model.unk_replacement = to_double(k, v); }},
      {"beam-size", [](RunConfig& c, auto& k, auto& v) { c.decode.beam = to_int(k, v); }},
      {"initial-learning-rate", [](RunConfig& c, auto& k, auto& v) { c.train.learning_rate = to_double(k, v); }},
      {"beta1-beta2", [](RunConfig& c, auto& k, auto& v) { c.train.beta1 = c.train.beta2 = to_double(k, v); }},
      {"batch-size", [](RunConfig& c, auto& k, auto& v) { c.train.batch_size = to_int(k, v); }},
      {"decay-rate", [](RunConfig& c, auto& k, auto& v) { c.train.decay_rate = to_double(k, v); }},
      {"gradient-clipping", [](RunConfig& c, auto& k, auto& v) { c.train.clip_norm = to_double(k, v); }},
      // everything else
      {"beta1", [](RunConfig& c, auto& k, auto& v) { c.train.beta1 = to_double(k, v); }},
      {"beta2", [](RunConfig& c, auto& k, auto& v) { c.train.beta2 = to_double(k, v); }},
      {"adam-epsilon", [](RunConfig& c, auto& k, auto& v) { c.train.epsilon = to_double(k, v); }},
      {"transition-system", [](RunConfig& c, auto&, auto& v) { c.model.system = parse_system_kind(v); }},
      {"fusion",
       [](RunConfig& c, auto&, auto& v) {
         c.model.fusion = parse_fusion_kind(v);
         c.fusion_set = true;
       }},
      {"gate", [](RunConfig& c, auto&, auto& v) { c.model.gate = parse_gate_kind(v); }},
      {"decoder-init",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "zeros")
           c.model.decoder_init = DecoderInit::kZeros;
         else if (v == "encoder-final")
           c.model.decoder_init = DecoderInit::kEncoderFinal;
         else
           throw UsageError("'" + k + "' expects zeros or encoder-final");
       }},
      {"plain-unk", [](RunConfig& c, auto& k, auto& v) { c.model.plain_unk = to_bool(k, v); }},
      {"max-word-chars", [](RunConfig& c, auto& k, auto& v) { c.model.max_word_chars = to_int(k, v); }},
      {"max-epochs", [](RunConfig& c, auto& k, auto& v) { c.train.max_epochs = to_int(k, v); }},
      {"patience", [](RunConfig& c, auto& k, auto& v) { c.train.patience = to_int(k, v); }},
      {"min-learning-rate", [](RunConfig& c, auto& k, auto& v) { c.train.min_learning_rate = to_double(k, v); }},
      {"seed",
       [](RunConfig& c, auto& k, auto& v) {
         try {
           std::size_t used = 0;
           c.train.seed = std::stoull(v, &used);
           if (used != v.size()) throw std::invalid_argument(v);
         } catch (const std::exception&) {
           throw UsageError("'" + k + "' expects a non-negative integer");
         }
       }},
      {"deterministic", [](RunConfig& c, auto& k, auto& v) { c.train.deterministic = to_bool(k, v); }},
      {"threads", [](RunConfig& c, auto& k, auto& v) { c.train.threads = to_int(k, v); }},
      {"projective",
       [](RunConfig& c, auto& k, auto& v) { c.decode.legality.projective_only = to_bool(k, v); }},
      {"single-root", [](RunConfig& c, auto& k, auto& v) { c.decode.legality.single_root = to_bool(k, v); }},
      {"dev-punct-policy", [](RunConfig& c, auto&, auto& v) { c.train.dev_punct = parse_punct_policy(v); }},
  };
  return table;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& [name, fn] : setters()) {
    if (name == key) {
      fn(*this, key, value);
      echo[key] = value;
      return;
    }
  }
  throw UsageError("unknown configuration key '" + key + "'");
}

void RunConfig::finalize() {
  if (!fusion_set) model.fusion = default_fusion(model.system);
  model.validate();
  train.validate();
  if (decode.beam < 1) throw UsageError("beam-size must be >= 1");
  // Teacher forcing and dev decoding honour the same constraints as parsing.
  train.legality = decode.legality;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(std::string_view(t).substr(0, eq));
    auto value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const UsageError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

}  // namespace hptr::cli
