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

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "awekws/embedders.hpp"
#include "awekws/nn/params.hpp"
#include "awekws/nn/rnn.hpp"
#include "awekws/nn/transformer.hpp"

namespace awekws::nn {

// Architecture description stored alongside the weights.
struct ModelSpec {
  std::string embedder_id;  // contrastive-transformer, contrastive-rnn or cae-rnn
  TransformerConfig transformer;
  RnnConfig rnn;
};

enum class Precision { kFloat32, kFloat64 };

std::string to_string(Precision p);
Precision parse_precision(const std::string& name);

// File layout: 8-byte tag "AWEKWSCK", uint32 format version, uint64 header
// length, a JSON header {embedder_id, dtype, config, params: [{name, shape}]},
// then every tensor's values row-major as little-endian float32/float64 in
// header order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec, const ParameterStore<float>& params);
void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec, const ParameterStore<double>& params);

struct LoadedCheckpoint {
  ModelSpec spec;
  Precision precision = Precision::kFloat32;
  ParameterStore<double> params;  // widened losslessly from the stored dtype
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// Rebuilds the stored model (in its stored precision) behind the Embedder interface.
std::unique_ptr<Embedder> load_embedder(const std::filesystem::path& path);

std::string describe(const ModelSpec& spec);  // JSON text

}  // namespace awekws::nn
