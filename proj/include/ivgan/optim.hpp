// ivgan/optim.hpp

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

#ifndef IVGAN_OPTIM_HPP_
#define IVGAN_OPTIM_HPP_

#include <cmath>
#include <vector>

#include "ivgan/nn.hpp"

namespace ivgan {

// RMSProp accumulator of squared gradients, one cell per parameter.
struct RmsPropState {
  std::vector<Mat> acc_w;
  std::vector<Vec> acc_b;
  double decay = 0.9;
  double epsilon = 1e-8;

  static RmsPropState for_net(const Mlp& net, double decay = 0.9,
                              double epsilon = 1e-8) {
    if (!(decay > 0.0 && decay < 1.0))
      throw ConfigError("RmsPropState: decay must be in (0,1)");
    if (!(epsilon > 0.0))
      throw ConfigError("RmsPropState: epsilon must be positive");
    RmsPropState st;
    st.decay = decay;
    st.epsilon = epsilon;
    st.acc_w.reserve(net.layers.size());
    st.acc_b.reserve(net.layers.size());
    for (const auto& l : net.layers) {
      st.acc_w.push_back(Mat::Zero(l.w.rows(), l.w.cols()));
      st.acc_b.push_back(Vec::Zero(l.b.size()));
    }
    return st;
  }
};

/// One RMSProp update: acc <- decay*acc + (1-decay)*g^2,
/// theta <- theta - lr*g/(sqrt(acc)+eps). A non-finite gradient aborts
/// before touching net or state.
inline void rmsprop_step(Mlp& net, const Gradients& grads, RmsPropState& state,
                         double lr) {
  if (grads.w.size() != net.layers.size() ||
      state.acc_w.size() != net.layers.size())
    throw DataError("rmsprop_step: shape mismatch among net/grads/state");
  if (!grads.all_finite())
    throw DivergenceError("rmsprop_step: non-finite gradient, step aborted");

  const double d = state.decay, eps = state.epsilon;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    Layer& l = net.layers[k];
    if (grads.w[k].rows() != l.w.rows() || grads.w[k].cols() != l.w.cols() ||
        grads.b[k].size() != l.b.size())
      throw DataError("rmsprop_step: gradient shape mismatch in layer " +
                      std::to_string(k));
    state.acc_w[k] = d * state.acc_w[k].array() +
                     (1.0 - d) * grads.w[k].array().square();
    state.acc_b[k] = d * state.acc_b[k].array() +
                     (1.0 - d) * grads.b[k].array().square();
    l.w.array() -=
        lr * grads.w[k].array() / (state.acc_w[k].array().sqrt() + eps);
    l.b.array() -=
        lr * grads.b[k].array() / (state.acc_b[k].array().sqrt() + eps);
  }
}

/// Clamps every weight and bias to [-c, +c]. Biases included: the
/// Wasserstein critic recipe clips all of its parameters.
inline void clip_parameters(Mlp& net, double c) {
  if (!(c > 0.0)) throw ConfigError("clip_parameters: c must be positive");
  for (Layer& l : net.layers) {
    l.w = l.w.cwiseMax(-c).cwiseMin(c);
    l.b = l.b.cwiseMax(-c).cwiseMin(c);
  }
}

}  // namespace ivgan

#endif  // IVGAN_OPTIM_HPP_
