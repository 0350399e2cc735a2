// src/checkpoint.cc

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

#include "wavefront/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "wavefront/error.h"

namespace wavefront {
namespace {

constexpr char kMagic[8] = {'W', 'A', 'V', 'E', 'F', 'R', 'N', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  template <class T>
  void pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <class T>
  T pod() {
    T v;
    std::memcpy(&v, need(sizeof(T)), sizeof(T));
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    return std::string(need(n), n);
  }
  const char* need(std::size_t n) {
    if (in_.size() - pos_ < n) throw FormatError("payload", "checkpoint is truncated");
    const char* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

const Matrix* Checkpoint::find(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t.value;
  }
  return nullptr;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Checkpoint make_checkpoint(const Pipeline& model, const SgdMomentum& optimizer,
                           std::uint64_t epoch) {
  Checkpoint ckpt;
  ckpt.config = model.config().canonical();
  ckpt.seed = model.seed();
  ckpt.epoch = epoch;
  ckpt.learning_rate = optimizer.learning_rate();
  ckpt.momentum = optimizer.momentum();
  for (const auto& ref : model.tensors()) ckpt.tensors.push_back({ref.name, *ref.tensor});
  for (const auto& ref : optimizer.velocity().tensors()) {
    ckpt.tensors.push_back({"velocity/" + ref.name, *ref.tensor});
  }
  return ckpt;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.pod(kCheckpointVersion);
  w.str(ckpt.config);
  w.pod(fnv1a64(ckpt.config));
  w.pod(ckpt.seed);
  w.pod(ckpt.epoch);
  w.pod(ckpt.learning_rate);
  w.pod(ckpt.momentum);
  w.pod(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    w.str(t.name);
    w.pod(static_cast<std::uint64_t>(t.value.rows()));
    w.pod(static_cast<std::uint64_t>(t.value.cols()));
    w.raw(t.value.data(), t.value.size() * sizeof(double));
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (std::memcmp(r.need(sizeof(kMagic)), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("magic", "not a wavefront checkpoint");
  }
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("version", "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.config = r.str();
  if (r.pod<std::uint64_t>() != fnv1a64(ckpt.config)) {
    throw FormatError("config_hash", "checkpoint config hash mismatch");
  }
  ckpt.seed = r.pod<std::uint64_t>();
  ckpt.epoch = r.pod<std::uint64_t>();
  ckpt.learning_rate = r.pod<double>();
  ckpt.momentum = r.pod<double>();
  const auto count = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.str();
    const auto rows = r.pod<std::uint64_t>();
    const auto cols = r.pod<std::uint64_t>();
    if (cols != 0 && rows > (bytes.size() / sizeof(double)) / cols) {
      throw FormatError("dims", "tensor '" + t.name + "' is larger than the file");
    }
    t.value = Matrix(rows, cols);
    std::memcpy(t.value.data(), r.need(rows * cols * sizeof(double)), rows * cols * sizeof(double));
    ckpt.tensors.push_back(std::move(t));
  }
  if (!r.done()) throw FormatError("payload", "trailing bytes after checkpoint");
  return ckpt;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

Pipeline restore_pipeline(const Checkpoint& ckpt) {
  Pipeline model(ckpt.pipeline_config(), ckpt.seed);
  for (auto& ref : model.tensors()) {
    const Matrix* stored = ckpt.find(ref.name);
    if (stored == nullptr) throw FormatError(ref.name, "checkpoint lacks tensor '" + ref.name + "'");
    if (!stored->same_shape(*ref.tensor)) {
      throw FormatError(ref.name, "tensor '" + ref.name + "' has the wrong shape");
    }
    *ref.tensor = *stored;
  }
  return model;
}

SgdMomentum restore_optimizer(const Checkpoint& ckpt, const Pipeline& model) {
  SgdMomentum opt(ckpt.learning_rate, ckpt.momentum, model.zero_gradients());
  for (auto& ref : opt.velocity().tensors()) {
    const std::string key = "velocity/" + ref.name;
    const Matrix* stored = ckpt.find(key);
    if (stored == nullptr) throw FormatError(key, "checkpoint lacks tensor '" + key + "'");
    if (!stored->same_shape(*ref.tensor)) {
      throw FormatError(key, "tensor '" + key + "' has the wrong shape");
    }
    *ref.tensor = *stored;
  }
  return opt;
}

}  // namespace wavefront
