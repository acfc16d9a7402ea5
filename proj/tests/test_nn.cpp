// tests/test_nn.cpp

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

#include "ivgan/nn.hpp"
#include "ivgan/rng.hpp"

using namespace ivgan;

namespace {

Mlp single_layer(int in, int out, Activation act, std::uint64_t seed = 3) {
  return init_mlp({in, out}, {act}, seed);
}

}  // namespace

TEST_CASE("init_mlp produces the configured shapes") {
  Mlp net = init_mlp({450, 512, 512, 512, 400},
                     {Activation::kLeakyRelu, Activation::kLeakyRelu,
                      Activation::kLeakyRelu, Activation::kTanh},
                     1);
  REQUIRE(net.layers.size() == 4);
  REQUIRE(net.layers[0].w.rows() == 512);
  REQUIRE(net.layers[0].w.cols() == 450);
  REQUIRE(net.layers[1].w.rows() == 512);
  REQUIRE(net.layers[1].w.cols() == 512);
  REQUIRE(net.layers[2].w.rows() == 512);
  REQUIRE(net.layers[2].w.cols() == 512);
  REQUIRE(net.layers[3].w.rows() == 400);
  REQUIRE(net.layers[3].w.cols() == 512);
  for (const Layer& l : net.layers) {
    REQUIRE(l.b.cwiseAbs().maxCoeff() == 0.0);
    double limit = std::sqrt(6.0 / (l.in_dim() + l.out_dim()));
    REQUIRE(l.w.cwiseAbs().maxCoeff() <= limit);
  }
}

TEST_CASE("init_mlp is deterministic in the seed") {
  Mlp a = init_mlp({5, 8, 3}, {Activation::kTanh, Activation::kLinear}, 99);
  Mlp b = init_mlp({5, 8, 3}, {Activation::kTanh, Activation::kLinear}, 99);
  for (std::size_t k = 0; k < a.layers.size(); ++k)
    REQUIRE(a.layers[k].w == b.layers[k].w);
  Mlp c = init_mlp({5, 8, 3}, {Activation::kTanh, Activation::kLinear}, 100);
  REQUIRE(a.layers[0].w != c.layers[0].w);
}

TEST_CASE("init_mlp rejects mismatched activation lists") {
  REQUIRE_THROWS_AS(init_mlp({4, 4, 4}, {Activation::kLinear}, 0),
                    ConfigError);
  REQUIRE_THROWS_AS(init_mlp({4}, {}, 0), ConfigError);
  REQUIRE_THROWS_AS(init_mlp({4, 0}, {Activation::kLinear}, 0), ConfigError);
}

TEST_CASE("softmax is final-layer only") {
  REQUIRE_THROWS_AS(
      init_mlp({3, 3, 3}, {Activation::kSoftmax, Activation::kLinear}, 0),
      ConfigError);
}

TEST_CASE("forward identity through a unit linear layer") {
  Mlp net = single_layer(4, 4, Activation::kLinear);
  net.layers[0].w = Mat::Identity(4, 4);
  net.layers[0].b.setZero();
  Rng rng(2);
  Mat x = rng.gaussian_mat(6, 4);
  REQUIRE(forward(net, x).output() == x);
  REQUIRE(forward_output(net, x) == x);
}

TEST_CASE("leaky relu slope 0.3") {
  Mlp net = single_layer(2, 2, Activation::kLeakyRelu);
  net.layers[0].w = Mat::Identity(2, 2);
  net.layers[0].b.setZero();
  Mat x(1, 2);
  x << -1.0, 2.0;
  Mat y = forward_output(net, x);
  REQUIRE(y(0, 0) == Approx(-0.3).margin(1e-15));
  REQUIRE(y(0, 1) == Approx(2.0).margin(1e-15));
}

TEST_CASE("leaky relu and tanh pointwise contracts") {
  Rng rng(8);
  Mlp net = single_layer(3, 3, Activation::kLeakyRelu, 21);
  net.layers[0].w = Mat::Identity(3, 3);
  net.layers[0].b.setZero();
  Mlp tnet = single_layer(3, 3, Activation::kTanh, 22);
  tnet.layers[0].w = Mat::Identity(3, 3);
  tnet.layers[0].b.setZero();
  for (int t = 0; t < 50; ++t) {
    Mat x = 3.0 * rng.gaussian_mat(1, 3);
    Mat y = forward_output(net, x);
    for (int c = 0; c < 3; ++c)
      REQUIRE(y(0, c) == (x(0, c) >= 0.0 ? x(0, c) : 0.3 * x(0, c)));
    Mat ty = forward_output(tnet, x);
    for (int c = 0; c < 3; ++c) {
      REQUIRE(ty(0, c) > -1.0);
      REQUIRE(ty(0, c) < 1.0);
    }
  }
}

TEST_CASE("softmax rows sum to one") {
  Mlp net = single_layer(5, 7, Activation::kSoftmax, 17);
  Rng rng(3);
  Mat x = 10.0 * rng.gaussian_mat(9, 5);
  Mat y = forward_output(net, x);
  for (int r = 0; r < y.rows(); ++r)
    REQUIRE(y.row(r).sum() == Approx(1.0).margin(1e-12));
}

TEST_CASE("forward rejects width mismatch") {
  Mlp net = single_layer(4, 2, Activation::kLinear);
  REQUIRE_THROWS_AS(forward(net, Mat::Zero(3, 5)), DataError);
}

TEST_CASE("forward is pure") {
  Mlp net = init_mlp({6, 11, 4},
                     {Activation::kLeakyRelu, Activation::kTanh}, 31);
  Rng rng(4);
  Mat x = rng.gaussian_mat(5, 6);
  Mat y1 = forward_output(net, x);
  Mat y2 = forward_output(net, x);
  REQUIRE(y1 == y2);  // bit-identical
}

TEST_CASE("backward with zero upstream yields zero gradients") {
  Mlp net = init_mlp({4, 6, 3},
                     {Activation::kLeakyRelu, Activation::kTanh}, 13);
  Rng rng(6);
  Mat x = rng.gaussian_mat(5, 4);
  ForwardCache cache = forward(net, x);
  BackwardResult res = backward(net, cache, Mat::Zero(5, 3));
  for (const Mat& g : res.grads.w) REQUIRE(g.cwiseAbs().maxCoeff() == 0.0);
  for (const Vec& g : res.grads.b) REQUIRE(g.cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(res.input_grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear layer with sum loss: weight gradient is the input column sums") {
  Mlp net = single_layer(5, 3, Activation::kLinear, 41);
  Rng rng(7);
  Mat x = rng.gaussian_mat(8, 5);
  ForwardCache cache = forward(net, x);
  BackwardResult res = backward(net, cache, Mat::Ones(8, 3));
  Vec colsum = x.colwise().sum().transpose();
  for (int o = 0; o < 3; ++o)
    REQUIRE((res.grads.w[0].row(o).transpose() - colsum).cwiseAbs().maxCoeff() <
            1e-12);

  LossProbe sum_loss{[](const Mat& out) { return out.sum(); },
                     [](const Mat& out) { return Mat::Ones(out.rows(), out.cols()); }};
  REQUIRE(finite_diff_check(net, sum_loss, x) < 1e-7);
}

TEST_CASE("tanh derivative at zero passes the upstream through") {
  Mlp net = single_layer(3, 3, Activation::kTanh);
  net.layers[0].w.setZero();
  net.layers[0].b.setZero();
  Rng rng(9);
  Mat x = rng.gaussian_mat(4, 3);
  Mat upstream = rng.gaussian_mat(4, 3);
  ForwardCache cache = forward(net, x);
  BackwardResult res = backward(net, cache, upstream);
  // tanh'(0) = 1, so the bias gradient is the plain column sum of upstream.
  REQUIRE((res.grads.b[0] - upstream.colwise().sum().transpose())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
}

TEST_CASE("finite differences: linear net with quadratic loss") {
  Mlp net = init_mlp({4, 5, 2}, {Activation::kLinear, Activation::kLinear},
                     23);
  Rng rng(10);
  Mat x = rng.gaussian_mat(6, 4);
  LossProbe quad{[](const Mat& out) { return 0.5 * out.squaredNorm(); },
                 [](const Mat& out) { return out; }};
  REQUIRE(finite_diff_check(net, quad, x) < 1e-7);
}

TEST_CASE("finite differences: softmax with cross-entropy head") {
  const int classes = 6;
  Mlp net = init_mlp({5, 9, classes},
                     {Activation::kLeakyRelu, Activation::kSoftmax}, 29);
  Rng rng(12);
  Mat x = rng.gaussian_mat(7, 5);
  std::vector<int> labels(7);
  for (auto& l : labels) l = rng.uniform_int(classes);
  LossProbe ce{
      [&](const Mat& probs) {
        double total = 0.0;
        for (Eigen::Index r = 0; r < probs.rows(); ++r)
          total += -std::log(probs(r, labels[r]));
        return total / probs.rows();
      },
      [&](const Mat& probs) {
        Mat up = Mat::Zero(probs.rows(), probs.cols());
        for (Eigen::Index r = 0; r < probs.rows(); ++r)
          up(r, labels[r]) = -1.0 / (probs.rows() * probs(r, labels[r]));
        return up;
      }};
  REQUIRE(finite_diff_check(net, ce, x) < 1e-6);
}

TEST_CASE("activation derivatives agree with central differences") {
  auto leaky = [](double x) { return x >= 0.0 ? x : 0.3 * x; };
  auto leaky_d = [](double x) { return x > 0.0 ? 1.0 : 0.3; };
  auto tanh_d = [](double x) {
    double t = std::tanh(x);
    return 1.0 - t * t;
  };
  Rng rng(14);
  const double h = 1e-6;
  for (int t = 0; t < 200; ++t) {
    double x = 4.0 * rng.gaussian();
    if (std::abs(x) < 1e-3) continue;  // keep away from the leaky kink
    double num_leaky = (leaky(x + h) - leaky(x - h)) / (2.0 * h);
    REQUIRE(num_leaky == Approx(leaky_d(x)).margin(1e-6));
    double num_tanh = (std::tanh(x + h) - std::tanh(x - h)) / (2.0 * h);
    REQUIRE(num_tanh == Approx(tanh_d(x)).margin(1e-6));
  }
}

TEST_CASE("backward rejects a cache from another net") {
  Mlp net = init_mlp({4, 6, 3},
                     {Activation::kLeakyRelu, Activation::kLinear}, 51);
  Mlp other = init_mlp({4, 7, 3},
                       {Activation::kLeakyRelu, Activation::kLinear}, 52);
  Rng rng(15);
  Mat x = rng.gaussian_mat(2, 4);
  ForwardCache cache = forward(other, x);
  REQUIRE_THROWS_AS(backward(net, cache, Mat::Zero(2, 3)), DataError);
}
