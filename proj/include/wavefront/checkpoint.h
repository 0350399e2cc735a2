// include/wavefront/checkpoint.h

// Copyright 2026  The Wavefront Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef WAVEFRONT_CHECKPOINT_H_
#define WAVEFRONT_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavefront/matrix.h"
#include "wavefront/model.h"

namespace wavefront {

// Binary container, little-endian:
//   "WAVEFRNT" | u32 version | str config | u64 fnv1a(config) | u64 seed |
//   u64 epoch | f64 learning_rate | f64 momentum | u32 count |
//   count x (str name | u64 rows | u64 cols | f64[rows * cols] row-major)
// where str = u32 length + bytes. Optimizer velocities are stored as
// "velocity/<tensor name>".

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Matrix value;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

struct Checkpoint {
  std::string config;  // PipelineConfig::canonical()
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  double learning_rate = 0.0;
  double momentum = 0.0;
  std::vector<NamedTensor> tensors;

  const Matrix* find(std::string_view name) const;
  bool has(std::string_view name) const { return find(name) != nullptr; }
  PipelineConfig pipeline_config() const { return PipelineConfig::from_canonical(config); }

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::uint64_t fnv1a64(std::string_view bytes);

Checkpoint make_checkpoint(const Pipeline& model, const SgdMomentum& optimizer,
                           std::uint64_t epoch);

std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws FormatError on a bad magic, version, hash or truncated payload.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

/// Rebuilds the model (and optionally the optimizer velocities) from a
/// checkpoint. Missing or misshapen tensors raise FormatError.
Pipeline restore_pipeline(const Checkpoint& ckpt);
SgdMomentum restore_optimizer(const Checkpoint& ckpt, const Pipeline& model);

}  // namespace wavefront

#endif  // WAVEFRONT_CHECKPOINT_H_
