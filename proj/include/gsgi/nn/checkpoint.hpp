// Copyright 2026 The GSG-I Lab Authors.
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

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gsgi/nn/network.hpp"

namespace gsgi::nn {

// Layout (all integers little-endian):
//   "GSGIQNET"  8 bytes magic
//   u32         format version
//   i32 x 6     rows, cols, channels, head kind, num outputs, trunk length
//   i32 x 4     per trunk layer: kind, size, kernel, stride
//   u64         parameter count
//   f32 x n     parameters in layer order
inline constexpr char kCheckpointMagic[8] = {'G', 'S', 'G', 'I', 'Q', 'N', 'E', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T> || std::is_same_v<T, float>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw std::runtime_error("truncated checkpoint");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

template <typename Scalar>
void save_checkpoint(const Network<Scalar>& net, std::ostream& out) {
  using detail::write_le;
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_le<std::uint32_t>(out, kCheckpointVersion);
  const NetworkSpec& s = net.spec();
  write_le<std::int32_t>(out, s.rows);
  write_le<std::int32_t>(out, s.cols);
  write_le<std::int32_t>(out, s.channels);
  write_le<std::int32_t>(out, static_cast<std::int32_t>(s.head));
  write_le<std::int32_t>(out, s.num_outputs);
  write_le<std::int32_t>(out, static_cast<std::int32_t>(s.trunk.size()));
  for (const LayerSpec& l : s.trunk) {
    write_le<std::int32_t>(out, static_cast<std::int32_t>(l.kind));
    write_le<std::int32_t>(out, l.size);
    write_le<std::int32_t>(out, l.kernel);
    write_le<std::int32_t>(out, l.stride);
  }
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(net.num_params()));
  for (Eigen::Index i = 0; i < net.num_params(); ++i) {
    write_le<float>(out, static_cast<float>(net.params()(i)));
  }
  if (!out) throw std::runtime_error("failed to write checkpoint");
}

template <typename Scalar>
Network<Scalar> load_checkpoint(std::istream& in) {
  using detail::read_le;
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("not a network checkpoint");
  }
  if (read_le<std::uint32_t>(in) != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  NetworkSpec s;
  s.rows = read_le<std::int32_t>(in);
  s.cols = read_le<std::int32_t>(in);
  s.channels = read_le<std::int32_t>(in);
  s.head = static_cast<HeadKind>(read_le<std::int32_t>(in));
  s.num_outputs = read_le<std::int32_t>(in);
  const auto layers = read_le<std::int32_t>(in);
  if (layers < 0 || layers > 1024) throw std::runtime_error("corrupt checkpoint");
  for (int i = 0; i < layers; ++i) {
    LayerSpec l;
    l.kind = static_cast<LayerKind>(read_le<std::int32_t>(in));
    l.size = read_le<std::int32_t>(in);
    l.kernel = read_le<std::int32_t>(in);
    l.stride = read_le<std::int32_t>(in);
    s.trunk.push_back(l);
  }
  Network<Scalar> net(s);
  const auto count = read_le<std::uint64_t>(in);
  if (count != static_cast<std::uint64_t>(net.num_params())) {
    throw std::runtime_error("checkpoint parameter count does not match its architecture");
  }
  for (Eigen::Index i = 0; i < net.num_params(); ++i) {
    net.params()(i) = static_cast<Scalar>(read_le<float>(in));
  }
  return net;
}

template <typename Scalar>
void save_checkpoint(const Network<Scalar>& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_checkpoint(net, out);
}

template <typename Scalar>
Network<Scalar> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  return load_checkpoint<Scalar>(in);
}

}  // namespace gsgi::nn
