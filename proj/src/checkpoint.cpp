// Copyright 2026 The awekws Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "awekws/nn/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace awekws::nn {
namespace {

using nlohmann::json;

constexpr char kTag[8] = {'A', 'W', 'E', 'K', 'W', 'S', 'C', 'K'};

template <typename U>
void write_le(std::ostream& out, U value) {
  static_assert(std::is_trivially_copyable_v<U>);
  unsigned char bytes[sizeof(U)];
  std::memcpy(bytes, &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U read_le(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(U));
  if (!in) fail(ErrorCode::kCheckpointFormat, "truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
  U value;
  std::memcpy(&value, bytes, sizeof(U));
  return value;
}

json config_json(const ModelSpec& spec) {
  if (spec.embedder_id == kContrastiveTransformerId) {
    const auto& c = spec.transformer;
    return {{"input_dim", c.input_dim}, {"model_dim", c.model_dim}, {"n_heads", c.n_heads},
            {"n_layers", c.n_layers},   {"ffn_dim", c.ffn_dim},     {"awe_dim", c.awe_dim}};
  }
  if (spec.embedder_id == kContrastiveRnnId || spec.embedder_id == kCaeRnnId) {
    const auto& c = spec.rnn;
    return {{"input_dim", c.input_dim}, {"hidden_dim", c.hidden_dim}, {"n_layers", c.n_layers},
            {"awe_dim", c.awe_dim}};
  }
  fail(ErrorCode::kInvalidArgument, "no trainable model named '" + spec.embedder_id + "'");
}

ModelSpec spec_from_json(const json& header) {
  ModelSpec spec;
  spec.embedder_id = header.at("embedder_id").get<std::string>();
  const auto& c = header.at("config");
  if (spec.embedder_id == kContrastiveTransformerId) {
    spec.transformer.input_dim = c.at("input_dim").get<Index>();
    spec.transformer.model_dim = c.at("model_dim").get<Index>();
    spec.transformer.n_heads = c.at("n_heads").get<Index>();
    spec.transformer.n_layers = c.at("n_layers").get<Index>();
    spec.transformer.ffn_dim = c.at("ffn_dim").get<Index>();
    spec.transformer.awe_dim = c.at("awe_dim").get<Index>();
  } else if (spec.embedder_id == kContrastiveRnnId || spec.embedder_id == kCaeRnnId) {
    spec.rnn.input_dim = c.at("input_dim").get<Index>();
    spec.rnn.hidden_dim = c.at("hidden_dim").get<Index>();
    spec.rnn.n_layers = c.at("n_layers").get<Index>();
    spec.rnn.awe_dim = c.at("awe_dim").get<Index>();
  } else {
    fail(ErrorCode::kCheckpointFormat, "unknown embedder id '" + spec.embedder_id + "'");
  }
  return spec;
}

template <typename T>
void save_impl(const std::filesystem::path& path, const ModelSpec& spec, const ParameterStore<T>& params) {
  json header = {{"format", "awekws-checkpoint"},
                 {"embedder_id", spec.embedder_id},
                 {"dtype", std::is_same_v<T, float> ? "float32" : "float64"},
                 {"config", config_json(spec)}};
  json list = json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    list.push_back({{"name", params.name(i)}, {"shape", {params.value(i).rows(), params.value(i).cols()}}});
  }
  header["params"] = std::move(list);
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kMissingFile, "cannot create checkpoint " + path.string());
  out.write(kTag, sizeof(kTag));
  write_le<std::uint32_t>(out, kCheckpointVersion);
  write_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = params.value(i);
    for (Index k = 0; k < v.size(); ++k) write_le<T>(out, v.data()[k]);
  }
  if (!out) fail(ErrorCode::kMissingFile, "failed writing checkpoint " + path.string());
}

template <typename T>
void read_payload(std::istream& in, ParameterStore<double>& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& v = params.value(i);
    for (Index k = 0; k < v.size(); ++k) v.data()[k] = static_cast<double>(read_le<T>(in));
  }
}

template <template <typename> class Model, typename Config>
std::unique_ptr<Embedder> rebuild(const LoadedCheckpoint& ck, const Config& config) {
  if (ck.precision == Precision::kFloat32) {
    return std::make_unique<ModelEmbedder<Model<float>>>(Model<float>(config, ck.params));
  }
  return std::make_unique<ModelEmbedder<Model<double>>>(Model<double>(config, ck.params));
}

}  // namespace

std::string to_string(Precision p) { return p == Precision::kFloat32 ? "f32" : "f64"; }

Precision parse_precision(const std::string& name) {
  if (name == "f32" || name == "float32") return Precision::kFloat32;
  if (name == "f64" || name == "float64") return Precision::kFloat64;
  fail(ErrorCode::kInvalidArgument, "unknown precision '" + name + "'");
}

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec, const ParameterStore<float>& params) {
  save_impl(path, spec, params);
}

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                     const ParameterStore<double>& params) {
  save_impl(path, spec, params);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kMissingFile, "cannot open checkpoint " + path.string());
  char tag[sizeof(kTag)];
  in.read(tag, sizeof(tag));
  if (!in || std::memcmp(tag, kTag, sizeof(kTag)) != 0) {
    fail(ErrorCode::kCheckpointFormat, path.string() + " is not an awekws checkpoint");
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    fail(ErrorCode::kCheckpointFormat, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = read_le<std::uint64_t>(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) fail(ErrorCode::kCheckpointFormat, "truncated checkpoint header");

  LoadedCheckpoint ck;
  try {
    const json header = json::parse(text);
    ck.spec = spec_from_json(header);
    ck.precision = parse_precision(header.at("dtype").get<std::string>());
    for (const auto& p : header.at("params")) {
      const auto shape = p.at("shape").get<std::vector<Index>>();
      if (shape.size() != 2) fail(ErrorCode::kCheckpointFormat, "parameter shapes must be 2-D");
      ck.params.add(p.at("name").get<std::string>(), shape[0], shape[1]);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kCheckpointFormat, std::string("bad checkpoint header: ") + e.what());
  }
  if (ck.precision == Precision::kFloat32) {
    read_payload<float>(in, ck.params);
  } else {
    read_payload<double>(in, ck.params);
  }
  in.peek();
  if (!in.eof()) fail(ErrorCode::kCheckpointFormat, "trailing bytes after checkpoint payload");
  return ck;
}

std::unique_ptr<Embedder> load_embedder(const std::filesystem::path& path) {
  const auto ck = load_checkpoint(path);
  const auto& id = ck.spec.embedder_id;
  if (id == kContrastiveTransformerId) return rebuild<ContrastiveTransformer>(ck, ck.spec.transformer);
  if (id == kContrastiveRnnId) return rebuild<ContrastiveRnn>(ck, ck.spec.rnn);
  return rebuild<CaeRnn>(ck, ck.spec.rnn);
}

std::string describe(const ModelSpec& spec) {
  return json{{"embedder_id", spec.embedder_id}, {"config", config_json(spec)}}.dump();
}

}  // namespace awekws::nn
