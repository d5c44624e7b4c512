#include "hptr/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hptr/error.hpp"

namespace hptr {
namespace {

constexpr std::string_view kMagic = "HPTRCKPT";

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(std::string_view in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[i])) << (8 * i);
  return v;
}

void put_f32(std::string& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

float get_f32(const char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

std::string serialize_checkpoint(const Model<float>& model, const nlohmann::json& metadata) {
  const auto& params = model.params();
  nlohmann::json header;
  header["format_version"] = kCheckpointFormatVersion;
  header["model_config"] = model.config();
  header["vocab"] = model.vocab();
  header["metadata"] = metadata;
  auto tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params.at(i);
    tensors.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(p.value.size());
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::string out;
  out.reserve(kMagic.size() + 8 + text.size() + offset * 4);
  out.append(kMagic);
  put_u64(out, text.size());
  out.append(text);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = params.at(i).value;
    for (ad::Index k = 0; k < v.size(); ++k) put_f32(out, v.data()[k]);
  }
  return out;
}

Model<float> deserialize_checkpoint(std::string_view bytes, nlohmann::json* metadata) {
  if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic)
    throw DataError("not a checkpoint file (bad magic)");
  const std::uint64_t len = get_u64(bytes.substr(kMagic.size(), 8));
  const std::size_t data_start = kMagic.size() + 8 + len;
  if (data_start > bytes.size()) throw DataError("truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kMagic.size() + 8, len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt checkpoint header: ") + e.what());
  }
  if (header.value("format_version", 0) != kCheckpointFormatVersion)
    throw DataError("unsupported checkpoint format version");

  try {
    ModelConfig config = header.at("model_config").get<ModelConfig>();
    Vocab vocab = header.at("vocab").get<Vocab>();
    const std::size_t floats = (bytes.size() - data_start) / 4;
    ad::ParameterSet<float> params;
    for (const auto& t : header.at("tensors")) {
      const auto rows = t.at("rows").get<ad::Index>();
      const auto cols = t.at("cols").get<ad::Index>();
      const auto off = t.at("offset").get<std::uint64_t>();
      if (off + static_cast<std::uint64_t>(rows * cols) > floats) throw DataError("truncated checkpoint data");
      ad::Matrix<float> m(rows, cols);
      const char* p = bytes.data() + data_start + off * 4;
      for (ad::Index k = 0; k < m.size(); ++k) m.data()[k] = get_f32(p + 4 * k);
      params.add(t.at("name").get<std::string>(), std::move(m));
    }
    if (metadata) *metadata = header.value("metadata", nlohmann::json::object());
    return Model<float>(config, std::move(vocab), std::move(params));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt checkpoint header: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Model<float>& model, const nlohmann::json& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  const std::string bytes = serialize_checkpoint(model, metadata);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint " + path);
}

Model<float> load_checkpoint(const std::string& path, nlohmann::json* metadata) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str(), metadata);
}

}  // namespace hptr
