// tests/test_optim.cpp

// Copyright 2026  Ivgan Authors

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

#include <catch2/catch.hpp>
#include <cmath>

#include "ivgan/optim.hpp"
#include "ivgan/rng.hpp"

using namespace ivgan;

namespace {

Mlp tiny_net(std::uint64_t seed = 77) {
  return init_mlp({3, 4, 2}, {Activation::kLeakyRelu, Activation::kLinear},
                  seed);
}

Gradients constant_grads(const Mlp& net, double value) {
  Gradients g = Gradients::zeros_like(net);
  for (auto& m : g.w) m.setConstant(value);
  for (auto& v : g.b) v.setConstant(value);
  return g;
}

}  // namespace

TEST_CASE("zero gradient leaves parameters unchanged and decays accumulators") {
  Mlp net = tiny_net();
  RmsPropState st = RmsPropState::for_net(net);
  st.acc_w[0].setConstant(0.5);
  Mlp before = net;
  rmsprop_step(net, constant_grads(net, 0.0), st, 0.1);
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    REQUIRE(net.layers[k].w == before.layers[k].w);
    REQUIRE(net.layers[k].b == before.layers[k].b);
  }
  REQUIRE(st.acc_w[0](0, 0) == Approx(0.45).margin(1e-15));  // 0.9 * 0.5
}

TEST_CASE("first step matches the update rule evaluated directly") {
  // acc = 0.1*1^2, delta = -0.1 * 1/(sqrt(0.1) + 1e-8) ~ -0.3162
  Mlp net = tiny_net();
  double w0 = net.layers[0].w(0, 0);
  RmsPropState st = RmsPropState::for_net(net, 0.9, 1e-8);
  rmsprop_step(net, constant_grads(net, 1.0), st, 0.1);
  double expected_delta = -0.1 * 1.0 / (std::sqrt(0.1) + 1e-8);
  REQUIRE(net.layers[0].w(0, 0) - w0 ==
          Approx(expected_delta).margin(1e-15));
  REQUIRE(net.layers[0].w(0, 0) - w0 == Approx(-0.3162).margin(1e-4));
  REQUIRE(st.acc_w[0](0, 0) == Approx(0.1).margin(1e-15));
}

TEST_CASE("repeated identical gradients shrink the step") {
  Mlp net = tiny_net();
  RmsPropState st = RmsPropState::for_net(net);
  double w0 = net.layers[0].w(0, 0);
  rmsprop_step(net, constant_grads(net, 1.0), st, 0.1);
  double w1 = net.layers[0].w(0, 0);
  rmsprop_step(net, constant_grads(net, 1.0), st, 0.1);
  double w2 = net.layers[0].w(0, 0);
  REQUIRE(std::abs(w2 - w1) < std::abs(w1 - w0));
}

TEST_CASE("update moves against the gradient sign") {
  Rng rng(20);
  Mlp net = tiny_net(21);
  RmsPropState st = RmsPropState::for_net(net);
  Gradients g = Gradients::zeros_like(net);
  for (auto& m : g.w)
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) m(r, c) = rng.gaussian();
  for (auto& v : g.b)
    for (int r = 0; r < v.size(); ++r) v(r) = rng.gaussian();
  Mlp before = net;
  rmsprop_step(net, g, st, 0.05);
  for (std::size_t k = 0; k < net.layers.size(); ++k)
    for (int r = 0; r < g.w[k].rows(); ++r)
      for (int c = 0; c < g.w[k].cols(); ++c)
        if (g.w[k](r, c) != 0.0) {
          double delta = net.layers[k].w(r, c) - before.layers[k].w(r, c);
          REQUIRE(delta * g.w[k](r, c) < 0.0);
        }
}

TEST_CASE("non-finite gradient aborts without touching the net") {
  Mlp net = tiny_net(30);
  Mlp before = net;
  RmsPropState st = RmsPropState::for_net(net);
  Gradients g = constant_grads(net, 1.0);
  g.w[1](0, 0) = std::nan("");
  REQUIRE_THROWS_AS(rmsprop_step(net, g, st, 0.1), DivergenceError);
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    REQUIRE(net.layers[k].w == before.layers[k].w);
    REQUIRE(st.acc_w[k].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("random step fuzz never produces non-finite parameters") {
  Rng rng(31);
  Mlp net = tiny_net(32);
  RmsPropState st = RmsPropState::for_net(net);
  for (int step = 0; step < 200; ++step) {
    Gradients g = Gradients::zeros_like(net);
    for (auto& m : g.w)
      for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
          m(r, c) = 1e3 * rng.gaussian();
    for (auto& v : g.b)
      for (int r = 0; r < v.size(); ++r) v(r) = 1e3 * rng.gaussian();
    rmsprop_step(net, g, st, 0.01);
    for (const Layer& l : net.layers) {
      REQUIRE(l.w.allFinite());
      REQUIRE(l.b.allFinite());
    }
  }
}

TEST_CASE("clip_parameters clamps and is idempotent") {
  Mlp net = tiny_net(40);
  net.layers[0].w(0, 0) = 0.5;
  net.layers[1].b(0) = -3.0;
  clip_parameters(net, 0.01);
  REQUIRE(net.layers[0].w(0, 0) == 0.01);
  REQUIRE(net.layers[1].b(0) == -0.01);
  for (const Layer& l : net.layers) {
    REQUIRE(l.w.cwiseAbs().maxCoeff() <= 0.01);
    REQUIRE(l.b.cwiseAbs().maxCoeff() <= 0.01);
  }
  Mlp once = net;
  clip_parameters(net, 0.01);
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    REQUIRE(net.layers[k].w == once.layers[k].w);  // bitwise
    REQUIRE(net.layers[k].b == once.layers[k].b);
  }
}

TEST_CASE("clip_parameters is a no-op inside the range") {
  Mlp net = tiny_net(41);
  for (Layer& l : net.layers) l.w *= 1e-3;
  Mlp before = net;
  clip_parameters(net, 0.01);
  for (std::size_t k = 0; k < net.layers.size(); ++k)
    REQUIRE(net.layers[k].w == before.layers[k].w);
}

TEST_CASE("clip_parameters rejects non-positive ranges") {
  Mlp net = tiny_net(42);
  REQUIRE_THROWS_AS(clip_parameters(net, 0.0), ConfigError);
  REQUIRE_THROWS_AS(clip_parameters(net, -1.0), ConfigError);
}
