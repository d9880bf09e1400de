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
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gsgi/rng.hpp"

namespace gsgi::nn {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class LayerKind : std::int32_t { kConv = 0, kRelu = 1, kMaxPool = 2, kDense = 3 };

/// One trunk layer. `size` is the filter count for conv and the output width
/// for dense; kernel/stride are unused by relu and dense.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  int size = 0;
  int kernel = 1;
  int stride = 1;

  static LayerSpec conv(int filters, int kernel, int stride) {
    return {LayerKind::kConv, filters, kernel, stride};
  }
  static LayerSpec relu() { return {LayerKind::kRelu, 0, 1, 1}; }
  static LayerSpec maxpool(int kernel, int stride) { return {LayerKind::kMaxPool, 0, kernel, stride}; }
  static LayerSpec dense(int out) { return {LayerKind::kDense, out, 1, 1}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

enum class HeadKind : std::int32_t { kSingleQ = 0, kDueling = 1, kPolicySoftmax = 2, kScalarValue = 3 };

/// Architecture description: input planes, trunk layers, then the head. The
/// trunk output is flattened (channels innermost) before the head.
struct NetworkSpec {
  int rows = 1;
  int cols = 1;
  int channels = 1;
  std::vector<LayerSpec> trunk;
  HeadKind head = HeadKind::kSingleQ;
  int num_outputs = 1;

  int input_size() const { return rows * cols * channels; }
  int output_size() const { return head == HeadKind::kScalarValue ? 1 : num_outputs; }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// The architecture used for square grids of side 3, 5 and 7: conv(16) with a
/// size-dependent kernel, relu, 2x2/1 max-pool, conv(32, 2x2, stride 2), relu,
/// pool, dense head. A pool is dropped when it would leave a spatial side below
/// the next layer's kernel (3x3 grids) or when the side is already 1.
NetworkSpec grid_network_spec(int grid_size, HeadKind head, int num_outputs, int channels = 19);

/// Convolutional value/policy network with explicit backpropagation.
/// Parameters are one flat vector; each layer views a contiguous block of it
/// (weights row-major as fan_in x fan_out, then biases).
template <typename Scalar>
class Network {
 public:
  using Matrix = RowMatrix<Scalar>;
  using Vec = Vector<Scalar>;

  Network() = default;
  explicit Network(NetworkSpec spec);

  const NetworkSpec& spec() const { return spec_; }
  Eigen::Index num_params() const { return params_.size(); }
  Vec& params() { return params_; }
  const Vec& params() const { return params_; }

  /// He-uniform weights (limit sqrt(6 / fan_in)), zero biases.
  void initialize(std::uint64_t seed);

  /// Batch forward: one input per row. Caches activations for backward().
  Matrix forward(const Matrix& input);
  /// Same values as forward() without touching the cache.
  Matrix predict(const Matrix& input) const;
  Vec predict_one(const Vec& input) const;

  /// Gradient of a scalar loss with respect to the parameters, given the
  /// gradient of that loss with respect to the outputs of the last forward().
  Vec backward(const Matrix& output_grad);

  bool has_cache() const { return cache_.valid; }

  /// Head parameter blocks (value and advantage for dueling, else only the first).
  struct Block {
    Eigen::Index offset = 0;
    Eigen::Index rows = 0;  // fan in
    Eigen::Index cols = 0;  // fan out
  };
  const std::vector<Block>& head_blocks() const { return head_blocks_; }

 private:
  struct Shape {
    int h = 1, w = 1, c = 1;
    int size() const { return h * w * c; }
  };
  struct Resolved {
    LayerSpec spec;
    Shape in, out;
    Block block;  // only meaningful for conv / dense
  };
  struct Cache {
    bool valid = false;
    Eigen::Index batch = 0;
    std::vector<Matrix> inputs;       // input of each trunk layer
    std::vector<Matrix> cols;         // im2col buffers (conv layers)
    std::vector<std::vector<int>> argmax;  // max-pool winners
    Matrix trunk_out;
    Matrix logits;                    // head pre-activation (policy head)
    Matrix output;
  };

  Matrix run(const Matrix& input, Cache* cache) const;
  void resolve();

  Eigen::Map<const Matrix> weights(const Block& b) const {
    return {params_.data() + b.offset, b.rows, b.cols};
  }
  Eigen::Map<const Vec> bias(const Block& b) const {
    return {params_.data() + b.offset + b.rows * b.cols, b.cols};
  }

  NetworkSpec spec_;
  std::vector<Resolved> layers_;
  std::vector<Block> head_blocks_;
  Shape trunk_shape_;
  Vec params_;
  Cache cache_;
};

// ---------------------------------------------------------------------------

inline NetworkSpec grid_network_spec(int grid_size, HeadKind head, int num_outputs, int channels) {
  int first_kernel = 0;
  switch (grid_size) {
    case 7: first_kernel = 4; break;
    case 5: first_kernel = 3; break;
    case 3: first_kernel = 2; break;
    default: throw std::invalid_argument("unsupported grid size " + std::to_string(grid_size));
  }
  NetworkSpec spec;
  spec.rows = spec.cols = grid_size;
  spec.channels = channels;
  spec.head = head;
  spec.num_outputs = num_outputs;

  int side = grid_size - first_kernel + 1;
  spec.trunk.push_back(LayerSpec::conv(16, first_kernel, 1));
  spec.trunk.push_back(LayerSpec::relu());
  if (side - 1 >= 2) {
    spec.trunk.push_back(LayerSpec::maxpool(2, 1));
    side -= 1;
  }
  spec.trunk.push_back(LayerSpec::conv(32, 2, 2));
  spec.trunk.push_back(LayerSpec::relu());
  side = (side - 2) / 2 + 1;
  if (side > 1) spec.trunk.push_back(LayerSpec::maxpool(2, 1));
  return spec;
}

template <typename Scalar>
Network<Scalar>::Network(NetworkSpec spec) : spec_(std::move(spec)) {
  resolve();
}

template <typename Scalar>
void Network<Scalar>::resolve() {
  layers_.clear();
  head_blocks_.clear();
  if (spec_.rows < 1 || spec_.cols < 1 || spec_.channels < 1 || spec_.num_outputs < 1) {
    throw std::invalid_argument("network dimensions must be positive");
  }
  Shape shape{spec_.rows, spec_.cols, spec_.channels};
  Eigen::Index offset = 0;
  for (const LayerSpec& ls : spec_.trunk) {
    Resolved r{ls, shape, shape, {}};
    switch (ls.kind) {
      case LayerKind::kConv: {
        if (ls.size < 1 || ls.kernel < 1 || ls.stride < 1 || ls.kernel > shape.h ||
            ls.kernel > shape.w) {
          throw std::invalid_argument("conv layer does not fit its input");
        }
        r.out = {(shape.h - ls.kernel) / ls.stride + 1, (shape.w - ls.kernel) / ls.stride + 1, ls.size};
        r.block = {offset, Eigen::Index(ls.kernel) * ls.kernel * shape.c, ls.size};
        offset += r.block.rows * r.block.cols + r.block.cols;
        break;
      }
      case LayerKind::kRelu: break;
      case LayerKind::kMaxPool: {
        if (ls.kernel < 1 || ls.stride < 1 || ls.kernel > shape.h || ls.kernel > shape.w) {
          throw std::invalid_argument("max-pool layer does not fit its input");
        }
        r.out = {(shape.h - ls.kernel) / ls.stride + 1, (shape.w - ls.kernel) / ls.stride + 1, shape.c};
        break;
      }
      case LayerKind::kDense: {
        if (ls.size < 1) throw std::invalid_argument("dense layer needs a positive width");
        r.out = {1, 1, ls.size};
        r.block = {offset, shape.size(), ls.size};
        offset += r.block.rows * r.block.cols + r.block.cols;
        break;
      }
    }
    shape = r.out;
    layers_.push_back(r);
  }
  trunk_shape_ = shape;
  const Eigen::Index flat = shape.size();
  auto add_head = [&](Eigen::Index out) {
    head_blocks_.push_back({offset, flat, out});
    offset += flat * out + out;
  };
  switch (spec_.head) {
    case HeadKind::kSingleQ:
    case HeadKind::kPolicySoftmax: add_head(spec_.num_outputs); break;
    case HeadKind::kScalarValue: add_head(1); break;
    case HeadKind::kDueling:
      add_head(1);
      add_head(spec_.num_outputs);
      break;
  }
  params_ = Vec::Zero(offset);
  cache_ = {};
}

template <typename Scalar>
void Network<Scalar>::initialize(std::uint64_t seed) {
  Rng rng(seed, Stream::kInit);
  params_.setZero();
  auto fill = [&](const Block& b) {
    const double limit = std::sqrt(6.0 / static_cast<double>(b.rows));
    for (Eigen::Index i = 0; i < b.rows * b.cols; ++i) {
      params_(b.offset + i) = static_cast<Scalar>(rng.uniform(-limit, limit));
    }
  };
  for (const auto& l : layers_) {
    if (l.spec.kind == LayerKind::kConv || l.spec.kind == LayerKind::kDense) fill(l.block);
  }
  for (const auto& b : head_blocks_) fill(b);
}

template <typename Scalar>
typename Network<Scalar>::Matrix Network<Scalar>::run(const Matrix& input, Cache* cache) const {
  if (input.cols() != spec_.input_size()) {
    throw std::invalid_argument("input width " + std::to_string(input.cols()) +
                                " does not match network input " +
                                std::to_string(spec_.input_size()));
  }
  const Eigen::Index batch = input.rows();
  if (cache) {
    cache->valid = false;
    cache->batch = batch;
    cache->inputs.assign(layers_.size(), Matrix());
    cache->cols.assign(layers_.size(), Matrix());
    cache->argmax.assign(layers_.size(), {});
  }
  Matrix x = input;
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const Resolved& l = layers_[li];
    const Shape in = l.in, out = l.out;
    Matrix y;
    switch (l.spec.kind) {
      case LayerKind::kConv: {
        const int k = l.spec.kernel, s = l.spec.stride;
        Matrix cols(batch * out.h * out.w, Eigen::Index(k) * k * in.c);
        for (Eigen::Index b = 0; b < batch; ++b) {
          const Scalar* src = x.data() + b * in.size();
          for (int oy = 0; oy < out.h; ++oy) {
            for (int ox = 0; ox < out.w; ++ox) {
              Scalar* dst = cols.data() + ((b * out.h + oy) * out.w + ox) * cols.cols();
              for (int ky = 0; ky < k; ++ky) {
                const Scalar* row = src + ((oy * s + ky) * in.w + ox * s) * in.c;
                std::copy(row, row + k * in.c, dst + ky * k * in.c);
              }
            }
          }
        }
        Matrix prod = cols * weights(l.block);
        prod.rowwise() += bias(l.block).transpose();
        y = Eigen::Map<Matrix>(prod.data(), batch, out.size());
        if (cache) cache->cols[li] = std::move(cols);
        break;
      }
      case LayerKind::kRelu: y = x.cwiseMax(Scalar(0)); break;
      case LayerKind::kMaxPool: {
        const int k = l.spec.kernel, s = l.spec.stride;
        y.resize(batch, out.size());
        std::vector<int> arg(static_cast<std::size_t>(batch * out.size()));
        for (Eigen::Index b = 0; b < batch; ++b) {
          for (int oy = 0; oy < out.h; ++oy) {
            for (int ox = 0; ox < out.w; ++ox) {
              for (int c = 0; c < in.c; ++c) {
                int best = ((oy * s) * in.w + ox * s) * in.c + c;
                Scalar best_v = x(b, best);
                for (int ky = 0; ky < k; ++ky) {
                  for (int kx = 0; kx < k; ++kx) {
                    const int idx = ((oy * s + ky) * in.w + ox * s + kx) * in.c + c;
                    if (x(b, idx) > best_v) {
                      best_v = x(b, idx);
                      best = idx;
                    }
                  }
                }
                const int o = (oy * out.w + ox) * in.c + c;
                y(b, o) = best_v;
                arg[static_cast<std::size_t>(b * out.size() + o)] = best;
              }
            }
          }
        }
        if (cache) cache->argmax[li] = std::move(arg);
        break;
      }
      case LayerKind::kDense: {
        y = x * weights(l.block);
        y.rowwise() += bias(l.block).transpose();
        break;
      }
    }
    if (cache) cache->inputs[li] = std::move(x);
    x = std::move(y);
  }

  Matrix out;
  switch (spec_.head) {
    case HeadKind::kSingleQ:
    case HeadKind::kScalarValue:
    case HeadKind::kPolicySoftmax: {
      const Block& b = head_blocks_[0];
      out = x * weights(b);
      out.rowwise() += bias(b).transpose();
      if (spec_.head == HeadKind::kPolicySoftmax) {
        if (cache) cache->logits = out;
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
          const Scalar m = out.row(r).maxCoeff();
          out.row(r) = (out.row(r).array() - m).exp();
          out.row(r) /= out.row(r).sum();
        }
      }
      break;
    }
    case HeadKind::kDueling: {
      const Block& vb = head_blocks_[0];
      const Block& ab = head_blocks_[1];
      Matrix v = x * weights(vb);
      v.rowwise() += bias(vb).transpose();
      out = x * weights(ab);
      out.rowwise() += bias(ab).transpose();
      out.colwise() += v.col(0);
      break;
    }
  }
  if (cache) {
    cache->trunk_out = std::move(x);
    cache->output = out;
    cache->valid = true;
  }
  return out;
}

template <typename Scalar>
typename Network<Scalar>::Matrix Network<Scalar>::forward(const Matrix& input) {
  return run(input, &cache_);
}

template <typename Scalar>
typename Network<Scalar>::Matrix Network<Scalar>::predict(const Matrix& input) const {
  return run(input, nullptr);
}

template <typename Scalar>
typename Network<Scalar>::Vec Network<Scalar>::predict_one(const Vec& input) const {
  Matrix x = input.transpose();
  return run(x, nullptr).row(0).transpose();
}

template <typename Scalar>
typename Network<Scalar>::Vec Network<Scalar>::backward(const Matrix& output_grad) {
  if (!cache_.valid) throw std::logic_error("backward() called before forward()");
  if (output_grad.rows() != cache_.batch || output_grad.cols() != spec_.output_size()) {
    throw std::invalid_argument("output gradient shape does not match the last forward()");
  }
  Vec grad = Vec::Zero(params_.size());
  auto accumulate = [&](const Block& b, const Matrix& x, const Matrix& dy) {
    Eigen::Map<Matrix>(grad.data() + b.offset, b.rows, b.cols).noalias() += x.transpose() * dy;
    Eigen::Map<Vec>(grad.data() + b.offset + b.rows * b.cols, b.cols) += dy.colwise().sum().transpose();
  };

  const Matrix& h = cache_.trunk_out;
  Matrix dx;
  switch (spec_.head) {
    case HeadKind::kSingleQ:
    case HeadKind::kScalarValue: {
      accumulate(head_blocks_[0], h, output_grad);
      dx = output_grad * weights(head_blocks_[0]).transpose();
      break;
    }
    case HeadKind::kPolicySoftmax: {
      const Matrix& p = cache_.output;
      Matrix dlogits(p.rows(), p.cols());
      for (Eigen::Index r = 0; r < p.rows(); ++r) {
        const Scalar dot = output_grad.row(r).dot(p.row(r));
        dlogits.row(r) = p.row(r).array() * (output_grad.row(r).array() - dot);
      }
      accumulate(head_blocks_[0], h, dlogits);
      dx = dlogits * weights(head_blocks_[0]).transpose();
      break;
    }
    case HeadKind::kDueling: {
      Matrix dv = output_grad.rowwise().sum();
      accumulate(head_blocks_[0], h, dv);
      accumulate(head_blocks_[1], h, output_grad);
      dx = dv * weights(head_blocks_[0]).transpose() + output_grad * weights(head_blocks_[1]).transpose();
      break;
    }
  }

  const Eigen::Index batch = cache_.batch;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const Resolved& l = layers_[li];
    const Matrix& x = cache_.inputs[li];
    const Shape in = l.in, out = l.out;
    Matrix dprev;
    switch (l.spec.kind) {
      case LayerKind::kConv: {
        const int k = l.spec.kernel, s = l.spec.stride;
        Eigen::Map<const Matrix> dy(dx.data(), batch * out.h * out.w, out.c);
        const Matrix& cols = cache_.cols[li];
        Eigen::Map<Matrix>(grad.data() + l.block.offset, l.block.rows, l.block.cols).noalias() +=
            cols.transpose() * dy;
        Eigen::Map<Vec>(grad.data() + l.block.offset + l.block.rows * l.block.cols, l.block.cols) +=
            dy.colwise().sum().transpose();
        Matrix dcols = dy * weights(l.block).transpose();
        dprev = Matrix::Zero(batch, in.size());
        for (Eigen::Index b = 0; b < batch; ++b) {
          Scalar* dst = dprev.data() + b * in.size();
          for (int oy = 0; oy < out.h; ++oy) {
            for (int ox = 0; ox < out.w; ++ox) {
              const Scalar* src = dcols.data() + ((b * out.h + oy) * out.w + ox) * dcols.cols();
              for (int ky = 0; ky < k; ++ky) {
                Scalar* row = dst + ((oy * s + ky) * in.w + ox * s) * in.c;
                const Scalar* from = src + ky * k * in.c;
                for (int i = 0; i < k * in.c; ++i) row[i] += from[i];
              }
            }
          }
        }
        break;
      }
      case LayerKind::kRelu:
        dprev = (x.array() > Scalar(0)).select(dx.array(), Scalar(0)).matrix();
        break;
      case LayerKind::kMaxPool: {
        dprev = Matrix::Zero(batch, in.size());
        const auto& arg = cache_.argmax[li];
        for (Eigen::Index b = 0; b < batch; ++b) {
          for (int o = 0; o < out.size(); ++o) {
            dprev(b, arg[static_cast<std::size_t>(b * out.size() + o)]) += dx(b, o);
          }
        }
        break;
      }
      case LayerKind::kDense:
        accumulate(l.block, x, dx);
        dprev = dx * weights(l.block).transpose();
        break;
    }
    dx = std::move(dprev);
  }
  return grad;
}

/// Networks used by the learning oracles and strategy checkpoints.
using QNetwork = Network<float>;

/// Builds and initializes the grid architecture for `grid_size`.
template <typename Scalar = float>
Network<Scalar> build_network(int grid_size, HeadKind head, int num_outputs, std::uint64_t seed) {
  Network<Scalar> net(grid_network_spec(grid_size, head, num_outputs));
  net.initialize(seed);
  return net;
}

}  // namespace gsgi::nn
