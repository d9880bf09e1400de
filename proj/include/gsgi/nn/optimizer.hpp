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

#include <cmath>
#include <stdexcept>

#include "gsgi/nn/network.hpp"

namespace gsgi::nn {

/// Rescales `grad` so its 2-norm is at most `threshold`; returns the norm
/// before clipping.
template <typename Derived>
double clip_global_norm(Eigen::MatrixBase<Derived>& grad, double threshold) {
  const double norm = static_cast<double>(grad.norm());
  if (norm > threshold) grad *= static_cast<typename Derived::Scalar>(threshold / norm);
  return norm;
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 2.0;  // <= 0 disables clipping
};

template <typename Scalar>
struct AdamState {
  Vector<Scalar> m;
  Vector<Scalar> v;
  long long step = 0;

  explicit AdamState(Eigen::Index n = 0) : m(Vector<Scalar>::Zero(n)), v(Vector<Scalar>::Zero(n)) {}
};

/// One clipped Adam step: g <- clip(g), then bias-corrected Adam on the
/// network parameters. Throws on non-finite gradients.
template <typename Scalar>
void apply_gradients(Network<Scalar>& net, Vector<Scalar> grad, AdamState<Scalar>& state,
                     double lr, const AdamConfig& cfg = {}) {
  if (grad.size() != net.num_params()) throw std::invalid_argument("gradient length mismatch");
  if (!grad.allFinite()) throw std::domain_error("non-finite gradient");
  if (state.m.size() != grad.size()) state = AdamState<Scalar>(grad.size());
  if (cfg.clip_norm > 0.0) clip_global_norm(grad, cfg.clip_norm);

  ++state.step;
  const auto b1 = static_cast<Scalar>(cfg.beta1);
  const auto b2 = static_cast<Scalar>(cfg.beta2);
  state.m = b1 * state.m + (Scalar(1) - b1) * grad;
  state.v = b2 * state.v + (Scalar(1) - b2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  const auto step_size = static_cast<Scalar>(lr / c1);
  const auto eps = static_cast<Scalar>(cfg.epsilon);
  const auto inv_c2 = static_cast<Scalar>(1.0 / c2);
  net.params().array() -=
      step_size * state.m.array() / ((state.v.array() * inv_c2).sqrt() + eps);
}

}  // namespace gsgi::nn
