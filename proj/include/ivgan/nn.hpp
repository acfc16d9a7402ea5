// ivgan/nn.hpp

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

#ifndef IVGAN_NN_HPP_
#define IVGAN_NN_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ivgan/common.hpp"
#include "ivgan/rng.hpp"

namespace ivgan {

enum class Activation { kLinear, kLeakyRelu, kTanh, kSoftmax };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kTanh: return "tanh";
    case Activation::kSoftmax: return "softmax";
  }
  return "?";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "linear") return Activation::kLinear;
  if (s == "leaky_relu") return Activation::kLeakyRelu;
  if (s == "tanh") return Activation::kTanh;
  if (s == "softmax") return Activation::kSoftmax;
  throw DataError("unknown activation: " + s);
}

struct Layer {
  Mat w;        // out x in
  Vec b;        // out
  Activation act = Activation::kLinear;
  double alpha = 0.3;  // leaky-ReLU slope for x < 0 (and at exactly 0)

  int in_dim() const { return static_cast<int>(w.cols()); }
  int out_dim() const { return static_cast<int>(w.rows()); }
};

// Dense feed-forward network. Batches are row-major: one sample per row.
struct Mlp {
  std::vector<Layer> layers;

  int input_dim() const { return layers.front().in_dim(); }
  int output_dim() const { return layers.back().out_dim(); }

  std::size_t num_params() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
  }

  void validate() const {
    if (layers.empty()) throw ConfigError("Mlp: no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const Layer& l = layers[k];
      if (l.w.rows() != l.b.size())
        throw ConfigError("Mlp: weight/bias shape mismatch in layer " +
                          std::to_string(k));
      if (k + 1 < layers.size() && l.out_dim() != layers[k + 1].in_dim())
        throw ConfigError("Mlp: layer " + std::to_string(k) + " output " +
                          std::to_string(l.out_dim()) + " does not chain into " +
                          std::to_string(layers[k + 1].in_dim()));
      if (l.act == Activation::kSoftmax && k + 1 != layers.size())
        throw ConfigError("Mlp: softmax allowed only on the final layer");
      if (!l.w.allFinite() || !l.b.allFinite())
        throw DivergenceError("Mlp: non-finite parameter in layer " +
                              std::to_string(k));
    }
  }
};

// Per-parameter partials of a scalar loss; shape-congruent with the net.
struct Gradients {
  std::vector<Mat> w;
  std::vector<Vec> b;

  static Gradients zeros_like(const Mlp& net) {
    Gradients g;
    g.w.reserve(net.layers.size());
    g.b.reserve(net.layers.size());
    for (const auto& l : net.layers) {
      g.w.push_back(Mat::Zero(l.w.rows(), l.w.cols()));
      g.b.push_back(Vec::Zero(l.b.size()));
    }
    return g;
  }

  bool all_finite() const {
    for (const auto& m : w)
      if (!m.allFinite()) return false;
    for (const auto& v : b)
      if (!v.allFinite()) return false;
    return true;
  }
};

/// Glorot-uniform weights in [-sqrt(6/(fan_in+fan_out)), +...], zero biases.
inline Mlp init_mlp(const std::vector<int>& sizes,
                    const std::vector<Activation>& acts, std::uint64_t seed,
                    double alpha = 0.3) {
  if (sizes.size() < 2)
    throw ConfigError("init_mlp: need at least one layer (two sizes)");
  if (acts.size() != sizes.size() - 1)
    throw ConfigError("init_mlp: " + std::to_string(sizes.size() - 1) +
                      " layers but " + std::to_string(acts.size()) +
                      " activations");
  for (int s : sizes)
    if (s <= 0) throw ConfigError("init_mlp: layer sizes must be positive");

  Rng rng(seed);
  Mlp net;
  net.layers.resize(acts.size());
  for (std::size_t k = 0; k < acts.size(); ++k) {
    int fan_in = sizes[k], fan_out = sizes[k + 1];
    double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Layer& l = net.layers[k];
    l.w.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c)
        l.w(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
    l.b = Vec::Zero(fan_out);
    l.act = acts[k];
    l.alpha = alpha;
  }
  net.validate();
  return net;
}

namespace detail {

inline void apply_activation(Mat& z, Activation act, double alpha, Mat& out) {
  switch (act) {
    case Activation::kLinear:
      out = z;
      break;
    case Activation::kLeakyRelu:
      out = z.unaryExpr([alpha](double x) { return x >= 0.0 ? x : alpha * x; });
      break;
    case Activation::kTanh:
      out = z.array().tanh().matrix();
      break;
    case Activation::kSoftmax: {
      // Row-max subtraction keeps exp() from overflowing.
      out.resize(z.rows(), z.cols());
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        double m = z.row(r).maxCoeff();
        Eigen::ArrayXd e = (z.row(r).array() - m).exp();
        out.row(r) = (e / e.sum()).matrix();
      }
      break;
    }
  }
}

}  // namespace detail

// Everything backward() needs: acts[0] is the input batch, acts[k+1] and
// pre[k] are layer k's activation and pre-activation.
struct ForwardCache {
  std::vector<Mat> pre;
  std::vector<Mat> acts;

  const Mat& output() const { return acts.back(); }
};

inline ForwardCache forward(const Mlp& net, const Mat& batch) {
  if (batch.cols() != net.input_dim())
    throw DataError("forward: batch width " + std::to_string(batch.cols()) +
                    " != input size " + std::to_string(net.input_dim()));
  ForwardCache cache;
  cache.pre.resize(net.layers.size());
  cache.acts.resize(net.layers.size() + 1);
  cache.acts[0] = batch;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const Layer& l = net.layers[k];
    cache.pre[k].noalias() = cache.acts[k] * l.w.transpose();
    cache.pre[k].rowwise() += l.b.transpose();
    detail::apply_activation(cache.pre[k], l.act, l.alpha, cache.acts[k + 1]);
    if (!cache.acts[k + 1].allFinite())
      throw DivergenceError("forward: non-finite activation in layer " +
                            std::to_string(k));
  }
  return cache;
}

/// Forward pass keeping only the final output (inference path).
inline Mat forward_output(const Mlp& net, const Mat& batch) {
  if (batch.cols() != net.input_dim())
    throw DataError("forward: batch width " + std::to_string(batch.cols()) +
                    " != input size " + std::to_string(net.input_dim()));
  Mat a = batch, z, next;
  for (const Layer& l : net.layers) {
    z.noalias() = a * l.w.transpose();
    z.rowwise() += l.b.transpose();
    detail::apply_activation(z, l.act, l.alpha, next);
    if (!next.allFinite())
      throw DivergenceError("forward: non-finite activation");
    a.swap(next);
  }
  return a;
}

struct BackwardResult {
  Gradients grads;
  Mat input_grad;  // dloss/dinput, N x in — carries the critic signal into G
};

/// Exact reverse-mode gradients for all weights and biases given
/// upstream = dloss/doutput. Set need_param_grads=false to get only the
/// input gradient (used when backpropagating through a frozen net).
inline BackwardResult backward(const Mlp& net, const ForwardCache& cache,
                               const Mat& upstream,
                               bool need_param_grads = true) {
  const std::size_t L = net.layers.size();
  if (cache.pre.size() != L || cache.acts.size() != L + 1)
    throw DataError("backward: cache does not match net");
  if (upstream.rows() != cache.output().rows() ||
      upstream.cols() != cache.output().cols())
    throw DataError("backward: upstream shape mismatch");

  BackwardResult res;
  if (need_param_grads) {
    res.grads.w.resize(L);
    res.grads.b.resize(L);
  }

  Mat da = upstream;
  Mat dz;
  for (std::size_t k = L; k-- > 0;) {
    const Layer& l = net.layers[k];
    const Mat& a = cache.acts[k + 1];
    const Mat& z = cache.pre[k];
    if (a.cols() != l.out_dim())
      throw DataError("backward: cache does not match net");
    switch (l.act) {
      case Activation::kLinear:
        dz = da;
        break;
      case Activation::kLeakyRelu: {
        double alpha = l.alpha;
        dz = da.binaryExpr(z, [alpha](double g, double x) {
          return x > 0.0 ? g : alpha * g;
        });
        break;
      }
      case Activation::kTanh:
        dz = da.cwiseProduct((1.0 - a.array().square()).matrix());
        break;
      case Activation::kSoftmax: {
        // dz_i = a_i * (da_i - sum_j da_j a_j), row-wise.
        Vec rowdot = (da.array() * a.array()).rowwise().sum();
        dz = a.cwiseProduct(da - rowdot * Mat::Ones(1, a.cols()));
        break;
      }
    }
    if (need_param_grads) {
      res.grads.w[k].noalias() = dz.transpose() * cache.acts[k];
      res.grads.b[k] = dz.colwise().sum().transpose();
    }
    // Propagate to the layer below; at k == 0 this is dloss/dinput.
    Mat prev;
    prev.noalias() = dz * l.w;
    if (k == 0) {
      res.input_grad = std::move(prev);
    } else {
      da = std::move(prev);
    }
  }
  return res;
}

// A scalar loss over a network's output batch together with its analytic
// output gradient; the unit the finite-difference checker consumes.
struct LossProbe {
  std::function<double(const Mat&)> value;
  std::function<Mat(const Mat&)> grad;
};

struct FdOptions {
  double step = 1e-5;
  // Nets with more parameters than this get a random subsample instead of
  // an exhaustive scan.
  std::size_t full_scan_limit = 2000;
  std::size_t subsample = 500;
  std::uint64_t seed = 12345;
};

/// Central-difference check of backward() against loss_fn on every
/// parameter (or a random subsample for large nets); returns
/// max |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
inline double finite_diff_check(const Mlp& net, const LossProbe& loss_fn,
                                const Mat& batch, const FdOptions& opt = {}) {
  ForwardCache cache = forward(net, batch);
  double base = loss_fn.value(cache.output());
  if (!std::isfinite(base))
    throw DivergenceError("finite_diff_check: non-finite loss");
  Mat upstream = loss_fn.grad(cache.output());
  BackwardResult analytic = backward(net, cache, upstream);

  const std::size_t total = net.num_params();
  std::vector<std::size_t> picks;
  if (total <= opt.full_scan_limit) {
    picks.resize(total);
    for (std::size_t i = 0; i < total; ++i) picks[i] = i;
  } else {
    Rng rng(opt.seed);
    std::size_t n = std::max<std::size_t>(opt.subsample, 500);
    picks.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      picks.push_back(static_cast<std::size_t>(
          rng.uniform_int(static_cast<int>(total))));
  }

  Mlp work = net;
  // Flat indexing: layer by layer, weights (row-major) then bias.
  auto locate = [&](std::size_t flat) -> double* {
    for (auto& l : work.layers) {
      std::size_t nw = static_cast<std::size_t>(l.w.size());
      if (flat < nw) {
        Eigen::Index r = static_cast<Eigen::Index>(flat) / l.w.cols();
        Eigen::Index c = static_cast<Eigen::Index>(flat) % l.w.cols();
        return &l.w(r, c);
      }
      flat -= nw;
      std::size_t nb = static_cast<std::size_t>(l.b.size());
      if (flat < nb) return &l.b(static_cast<Eigen::Index>(flat));
      flat -= nb;
    }
    throw DataError("finite_diff_check: parameter index out of range");
  };
  auto analytic_at = [&](std::size_t flat) -> double {
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
      std::size_t nw = static_cast<std::size_t>(net.layers[k].w.size());
      if (flat < nw) {
        Eigen::Index r = static_cast<Eigen::Index>(flat) / net.layers[k].w.cols();
        Eigen::Index c = static_cast<Eigen::Index>(flat) % net.layers[k].w.cols();
        return analytic.grads.w[k](r, c);
      }
      flat -= nw;
      std::size_t nb = static_cast<std::size_t>(net.layers[k].b.size());
      if (flat < nb) return analytic.grads.b[k](static_cast<Eigen::Index>(flat));
      flat -= nb;
    }
    throw DataError("finite_diff_check: parameter index out of range");
  };

  double worst = 0.0;
  for (std::size_t flat : picks) {
    double* p = locate(flat);
    double saved = *p;
    *p = saved + opt.step;
    double up = loss_fn.value(forward_output(work, batch));
    *p = saved - opt.step;
    double down = loss_fn.value(forward_output(work, batch));
    *p = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw DivergenceError("finite_diff_check: non-finite loss");
    double numeric = (up - down) / (2.0 * opt.step);
    double a = analytic_at(flat);
    double rel = std::abs(a - numeric) /
                 std::max(1e-8, std::abs(a) + std::abs(numeric));
    if (rel > worst) worst = rel;
  }
  return worst;
}

}  // namespace ivgan

#endif  // IVGAN_NN_HPP_
