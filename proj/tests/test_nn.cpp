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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "gsgi/nn/checkpoint.hpp"
#include "gsgi/nn/network.hpp"
#include "gsgi/nn/optimizer.hpp"
#include "gradcheck.hpp"

using namespace gsgi;
using namespace gsgi::nn;
using testing::gradient_error;
using testing::Mat;
using testing::Net;
using testing::random_input;
using testing::small_spec;

TEST_CASE("grid architectures") {
  const auto q7 = build_network<float>(7, HeadKind::kSingleQ, 5, 1);
  CHECK(q7.spec().output_size() == 5);
  CHECK(q7.predict_one(Vector<float>::Zero(7 * 7 * 19)).size() == 5);
  const auto a5 = build_network<float>(5, HeadKind::kDueling, 10, 1);
  CHECK(a5.predict_one(Vector<float>::Zero(5 * 5 * 19)).size() == 10);
  const auto s3 = grid_network_spec(3, HeadKind::kSingleQ, 5);
  CHECK(s3.trunk.front() == LayerSpec::conv(16, 2, 1));
  CHECK(grid_network_spec(7, HeadKind::kSingleQ, 5).trunk.front() == LayerSpec::conv(16, 4, 1));
  CHECK(grid_network_spec(5, HeadKind::kSingleQ, 5).trunk.front() == LayerSpec::conv(16, 3, 1));
  CHECK_THROWS_AS(grid_network_spec(4, HeadKind::kSingleQ, 5), std::invalid_argument);
  const auto again = build_network<float>(7, HeadKind::kSingleQ, 5, 1);
  CHECK(again.params() == q7.params());
  CHECK(build_network<float>(7, HeadKind::kSingleQ, 5, 2).params() != q7.params());
}

TEST_CASE("forward basics") {
  SUBCASE("zero parameters give zero outputs") {
    Net net(grid_network_spec(3, HeadKind::kSingleQ, 5));
    const Mat x = random_input(net.spec(), 4, 1);
    CHECK(net.predict(x).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("policy head is a distribution") {
    Net net(grid_network_spec(5, HeadKind::kPolicySoftmax, 5));
    net.initialize(3);
    const Mat p = net.predict(random_input(net.spec(), 6, 2));
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      CHECK(p.row(r).sum() == doctest::Approx(1.0));
      CHECK(p.row(r).minCoeff() > 0.0);
    }
  }
  SUBCASE("dueling with a zero advantage branch") {
    Net net(grid_network_spec(3, HeadKind::kDueling, 5));
    net.initialize(4);
    const auto& adv = net.head_blocks()[1];
    net.params().segment(adv.offset, adv.rows * adv.cols + adv.cols).setZero();
    const Mat q = net.predict(random_input(net.spec(), 3, 5));
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      for (Eigen::Index a = 1; a < q.cols(); ++a) CHECK(q(r, a) == q(r, 0));
    }
  }
  SUBCASE("hand-computed convolution") {
    Net net(small_spec(HeadKind::kSingleQ, {LayerSpec::conv(1, 2, 1)}, 2, 2, 1, 1));
    REQUIRE(net.num_params() == 7);
    net.params() << 1, 0, -1, 2, 0.5, 2, -1;  // conv weights, conv bias, head weight, head bias
    Vector<double> x(4);
    x << 1, 2, 3, 4;
    // conv: 1*1 + 0*2 - 1*3 + 2*4 + 0.5 = 6.5; head: 2 * 6.5 - 1 = 12
    CHECK(net.predict_one(x)(0) == doctest::Approx(12.0));
  }
  SUBCASE("input width is checked") {
    Net net(grid_network_spec(3, HeadKind::kSingleQ, 5));
    CHECK_THROWS_AS(net.predict(Mat::Zero(1, 10)), std::invalid_argument);
    CHECK_THROWS_AS(net.backward(Mat::Zero(1, 5)), std::logic_error);
  }
  SUBCASE("float and double agree") {
    auto f = build_network<float>(3, HeadKind::kDueling, 10, 6);
    Net d(f.spec());
    d.params() = f.params().cast<double>();
    const Mat x = random_input(d.spec(), 2, 7);
    const Mat yd = d.predict(x);
    const auto yf = f.predict(x.cast<float>());
    CHECK((yf.cast<double>() - yd).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("backward matches finite differences") {
  std::uint64_t seed = 1;
  for (const auto& [name, spec] : testing::gradient_check_specs()) {
    CAPTURE(name);
    CHECK(Net(spec).num_params() < 500);
    CHECK(gradient_error(spec, seed++) < 1e-4);
  }
}

TEST_CASE("backward closed forms") {
  SUBCASE("zero output gradient") {
    Net net(grid_network_spec(3, HeadKind::kDueling, 5));
    net.initialize(1);
    net.forward(random_input(net.spec(), 2, 1));
    CHECK(net.backward(Mat::Zero(2, 5)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("linear layer under a quadratic loss") {
    Net net(small_spec(HeadKind::kSingleQ, {}, 1, 1, 3, 2));
    net.initialize(2);
    Mat x(1, 3);
    x << 0.5, -1.0, 2.0;
    Mat target(1, 2);
    target << 1.0, -1.0;
    const Mat err = net.forward(x) - target;  // dL/dy for L = |y - t|^2 / 2
    const Vector<double> g = net.backward(err);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 2; ++j) CHECK(g(i * 2 + j) == doctest::Approx(x(0, i) * err(0, j)));
    }
    CHECK(g(6) == doctest::Approx(err(0, 0)));
    CHECK(g(7) == doctest::Approx(err(0, 1)));
  }
}

TEST_CASE("checkpoint round trip") {
  const auto net = build_network<float>(5, HeadKind::kDueling, 10, 9);
  std::stringstream buffer;
  save_checkpoint(net, buffer);
  const auto back = load_checkpoint<float>(buffer);
  CHECK(back.spec() == net.spec());
  CHECK(back.params() == net.params());
  const auto x = random_input(net.spec(), 3, 4).cast<float>().eval();
  CHECK(back.predict(x) == net.predict(x));
  std::stringstream junk("not a checkpoint at all");
  CHECK_THROWS(load_checkpoint<float>(junk));
}

TEST_CASE("gradient clipping") {
  Vector<double> g(4);
  g << 2, -2, 2, 2;  // norm 4
  const Vector<double> before = g;
  CHECK(clip_global_norm(g, 2.0) == doctest::Approx(4.0));
  CHECK((g - before / 2).cwiseAbs().maxCoeff() < 1e-15);
  const Vector<double> once = g;
  clip_global_norm(g, 2.0);
  CHECK(g == once);
  Vector<double> small(2);
  small << 0.1, 0.2;
  const Vector<double> keep = small;
  clip_global_norm(small, 2.0);
  CHECK(small == keep);
}

TEST_CASE("adam") {
  Net net(small_spec(HeadKind::kSingleQ, {}, 1, 1, 3, 2));
  net.initialize(1);
  SUBCASE("first step moves by lr against the sign") {
    const Vector<double> start = net.params();
    Vector<double> g(net.num_params());
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = (i % 2 ? 0.3 : -0.2);
    AdamState<double> st;
    AdamConfig cfg;
    cfg.clip_norm = 0.0;
    apply_gradients(net, g, st, 1e-3, cfg);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double sign = g(i) > 0 ? 1.0 : -1.0;
      CHECK(net.params()(i) - start(i) == doctest::Approx(-1e-3 * sign).epsilon(1e-5));
    }
  }
  SUBCASE("clipping happens before the update") {
    Vector<double> g = Vector<double>::Zero(net.num_params());
    g(0) = 4.0;
    AdamState<double> st;
    apply_gradients(net, g, st, 1e-3);
    CHECK(st.m(0) == doctest::Approx(0.1 * 2.0));
  }
  SUBCASE("zero gradient leaves parameters unchanged") {
    const Vector<double> start = net.params();
    AdamState<double> st;
    apply_gradients(net, Vector<double>(Vector<double>::Zero(net.num_params())), st, 1e-2);
    CHECK(net.params() == start);
    CHECK(st.m.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("non-finite gradients are rejected") {
    Vector<double> g = Vector<double>::Zero(net.num_params());
    g(1) = std::numeric_limits<double>::infinity();
    AdamState<double> st;
    CHECK_THROWS_AS(apply_gradients(net, g, st, 1e-3), std::domain_error);
  }
}
