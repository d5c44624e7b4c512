#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hptr/model.hpp"

namespace hptr {

inline constexpr int kCheckpointFormatVersion = 1;

// Container layout:
//   8 bytes   magic "HPTRCKPT"
//   8 bytes   little-endian uint64 length L of the JSON header
//   L bytes   JSON header: format_version, model_config, vocab, tensors[]
//             (name, rows, cols, offset in floats), plus caller metadata
//   rest      float32 little-endian tensor data, column-major, in header order
std::string serialize_checkpoint(const Model<float>& model, const nlohmann::json& metadata = nlohmann::json::object());
Model<float> deserialize_checkpoint(std::string_view bytes, nlohmann::json* metadata = nullptr);

void save_checkpoint(const std::string& path, const Model<float>& model,
                     const nlohmann::json& metadata = nlohmann::json::object());
Model<float> load_checkpoint(const std::string& path, nlohmann::json* metadata = nullptr);

}  // namespace hptr
