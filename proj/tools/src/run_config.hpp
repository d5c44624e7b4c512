#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hptr/infer.hpp"
#include "hptr/model.hpp"
#include "hptr/train.hpp"

namespace hptr::cli {

// Model, training and decoding settings resolved from defaults, `--tiny`, a
// config file and command-line overrides (in that order).
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  DecodeOptions decode;
  bool fusion_set = false;  // otherwise derived from the transition system
  std::map<std::string, std::string> echo;  // every key that was set, last value wins

  // Throws UsageError for unknown keys and unparsable values.
  void set(const std::string& key, const std::string& value);
  // Final consistency pass (default fusion, compatibility, ranges).
  void finalize();
};

// Flat `key = value` file; '#' starts a comment; blank lines ignored.
// Returns pairs in file order. Throws UsageError naming the line.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

const std::vector<std::string>& known_keys();

}  // namespace hptr::cli
