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

#include <Eigen/Core>

#include "gsgi/config.hpp"
#include "gsgi/simulator.hpp"

namespace gsgi {

/// Number of feature planes in a state tensor.
inline constexpr int kStateChannels = 19;

namespace channel {
inline constexpr int kOpponentEntering = 0;  // 4 planes, side order U, D, L, R
inline constexpr int kOpponentLeaving = 4;
inline constexpr int kOwnEntering = 8;
inline constexpr int kOwnLeaving = 12;
inline constexpr int kPosition = 16;
inline constexpr int kSuccess = 17;
inline constexpr int kTime = 18;
}  // namespace channel

/// Flat index of (row, col, channel) in a rows x cols x 19 tensor stored
/// row-major with channels innermost.
inline int tensor_index(const GameConfig& config, int row, int col, int ch) {
  return (row * config.cols + col) * kStateChannels + ch;
}

inline int state_tensor_size(const GameConfig& config) {
  return config.num_cells() * kStateChannels;
}

/// Writes the state tensor of `obs` into `out` (length rows*cols*19).
template <typename Derived>
void encode_state(const Observation& obs, const GameConfig& config,
                  Eigen::DenseBase<Derived> const& out_const) {
  auto& out = const_cast<Eigen::DenseBase<Derived>&>(out_const);
  using Scalar = typename Derived::Scalar;
  out.setZero();
  const Scalar time = static_cast<Scalar>(obs.normalized_time());
  for (int r = 0; r < config.rows; ++r) {
    for (int c = 0; c < config.cols; ++c) {
      const int cell = r * config.cols + c;
      const int base = cell * kStateChannels;
      const std::uint8_t opp = obs.opponent_memory.mask(cell);
      const std::uint8_t own = obs.own_footprints.mask(cell);
      for (int bit = 0; bit < 8; ++bit) {
        if (opp & (1u << bit)) out(base + channel::kOpponentEntering + bit) = Scalar(1);
        if (own & (1u << bit)) out(base + channel::kOwnEntering + bit) = Scalar(1);
      }
      out(base + channel::kSuccess) = static_cast<Scalar>(config.success_map[std::size_t(cell)]);
      out(base + channel::kTime) = time;
    }
  }
  out(tensor_index(config, obs.position.row, obs.position.col, channel::kPosition)) = Scalar(1);
}

inline Eigen::VectorXd encode_state(const Observation& obs, const GameConfig& config) {
  Eigen::VectorXd v(state_tensor_size(config));
  encode_state(obs, config, v);
  return v;
}

}  // namespace gsgi
