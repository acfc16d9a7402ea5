// ivgan/gradcheck.hpp

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

#ifndef IVGAN_GRADCHECK_HPP_
#define IVGAN_GRADCHECK_HPP_

#include <string>
#include <vector>

#include "ivgan/gan.hpp"
#include "ivgan/nn.hpp"
#include "ivgan/rng.hpp"
#include "ivgan/vecspace.hpp"

namespace ivgan {

struct GradCheckResult {
  std::string name;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Finite-difference verification of every analytic gradient path the
/// training loop uses, on small dense networks (vector dim 8, hidden width
/// 16). Each entry compares backward() against central differences.
inline std::vector<GradCheckResult> run_gradient_suite(
    std::uint64_t seed = 7) {
  const int dim = 8, noise = 4, hidden = 16, speakers = 5, batch = 12;
  Rng rng(seed);

  GanModels models;
  models.g = init_mlp({dim + noise, hidden, hidden, hidden, dim},
                      {Activation::kLeakyRelu, Activation::kLeakyRelu,
                       Activation::kLeakyRelu, Activation::kTanh},
                      rng.next_u64());
  models.g_sup = init_mlp({dim, hidden, speakers},
                          {Activation::kLeakyRelu, Activation::kSoftmax},
                          rng.next_u64());
  models.d = init_mlp({2 * dim, hidden, hidden, hidden, hidden, 1},
                      {Activation::kLeakyRelu, Activation::kLeakyRelu,
                       Activation::kLeakyRelu, Activation::kLeakyRelu,
                       Activation::kLinear},
                      rng.next_u64());

  Mat x = rng.gaussian_mat(batch, dim);
  Mat y = rng.gaussian_mat(batch, dim);
  length_normalize_rows(x);
  length_normalize_rows(y);
  Mat z = 0.5 * rng.gaussian_mat(batch, noise);
  Mat g_in = detail::concat_cols(x, z);
  std::vector<int> labels(batch);
  for (int i = 0; i < batch; ++i) labels[i] = rng.uniform_int(speakers);

  GanConfig weights;
  weights.a = 4.0;
  weights.b = 7.0;
  weights.c = 1.0;
  weights.num_speakers = speakers;

  std::vector<GradCheckResult> results;
  auto record = [&](const std::string& name, double err, double tol) {
    results.push_back({name, err, tol, err < tol});
  };

  // Critic gap with respect to the critic's own parameters. The real and
  // generated halves ride in one stacked batch.
  {
    Mat yhat = g_forward(models, x, z);
    Mat d_in(2 * batch, 2 * dim);
    d_in.topRows(batch) = detail::concat_cols(x, y);
    d_in.bottomRows(batch) = detail::concat_cols(x, yhat);
    LossProbe probe;
    probe.value = [batch](const Mat& out) {
      return -(out.topRows(batch).mean() - out.bottomRows(batch).mean());
    };
    probe.grad = [batch](const Mat& out) {
      Mat up(out.rows(), 1);
      up.topRows(batch).setConstant(-1.0 / batch);
      up.bottomRows(batch).setConstant(1.0 / batch);
      return up;
    };
    record("critic_objective_wrt_D", finite_diff_check(models.d, probe, d_in),
           1e-4);
  }

  // Adversarial loss through the frozen critic, with respect to G.
  {
    LossProbe probe;
    probe.value = [&](const Mat& out) {
      return -forward_output(models.d, detail::concat_cols(x, out)).mean();
    };
    probe.grad = [&](const Mat& out) {
      return detail::adv_loss_grad(models.d, x, out).gen_grad;
    };
    record("adversarial_loss_wrt_G", finite_diff_check(models.g, probe, g_in),
           1e-4);
  }

  // Cosine distance to the reliable targets, with respect to G.
  {
    LossProbe probe;
    probe.value = [&](const Mat& out) { return cosine_loss(out, y); };
    probe.grad = [&](const Mat& out) {
      return detail::cosine_loss_grad(out, y).grad;
    };
    record("cosine_loss_wrt_G", finite_diff_check(models.g, probe, g_in),
           1e-4);
  }

  // Speaker cross-entropy through the auxiliary head, with respect to G.
  {
    LossProbe probe;
    probe.value = [&](const Mat& out) { return ce_loss(models, out, labels); };
    probe.grad = [&](const Mat& out) {
      return detail::ce_loss_grad(models.g_sup, out, labels).input_grad;
    };
    record("cross_entropy_wrt_G", finite_diff_check(models.g, probe, g_in),
           1e-4);
  }

  // Cross-entropy with respect to the head's own parameters.
  {
    Mat gen = g_forward(models, x, z);
    LossProbe probe;
    probe.value = [&](const Mat& probs) {
      double total = 0.0;
      for (Eigen::Index r = 0; r < probs.rows(); ++r)
        total += -std::log(std::max(probs(r, labels[r]), 1e-300));
      return total / probs.rows();
    };
    probe.grad = [&](const Mat& probs) {
      Mat up = Mat::Zero(probs.rows(), probs.cols());
      for (Eigen::Index r = 0; r < probs.rows(); ++r)
        up(r, labels[r]) =
            -1.0 / (probs.rows() * std::max(probs(r, labels[r]), 1e-300));
      return up;
    };
    record("cross_entropy_wrt_head",
           finite_diff_check(models.g_sup, probe, gen), 1e-4);
  }

  // The full weighted generator objective (4, 7, 1), with respect to G.
  {
    LossProbe probe;
    probe.value = [&](const Mat& out) {
      double adv =
          -forward_output(models.d, detail::concat_cols(x, out)).mean();
      return combined_g_loss(adv, cosine_loss(out, y),
                             ce_loss(models, out, labels), weights);
    };
    probe.grad = [&](const Mat& out) {
      Mat g = weights.a * detail::adv_loss_grad(models.d, x, out).gen_grad;
      g += weights.b * detail::cosine_loss_grad(out, y).grad;
      g += weights.c *
           detail::ce_loss_grad(models.g_sup, out, labels).input_grad;
      return g;
    };
    record("combined_loss_wrt_G", finite_diff_check(models.g, probe, g_in),
           1e-4);
  }

  // The same composite with respect to the head (only the weighted
  // cross-entropy term reaches it).
  {
    Mat gen = g_forward(models, x, z);
    LossProbe probe;
    probe.value = [&](const Mat& probs) {
      double total = 0.0;
      for (Eigen::Index r = 0; r < probs.rows(); ++r)
        total += -std::log(std::max(probs(r, labels[r]), 1e-300));
      return weights.c * total / probs.rows();
    };
    probe.grad = [&](const Mat& probs) {
      Mat up = Mat::Zero(probs.rows(), probs.cols());
      for (Eigen::Index r = 0; r < probs.rows(); ++r)
        up(r, labels[r]) =
            -weights.c /
            (probs.rows() * std::max(probs(r, labels[r]), 1e-300));
      return up;
    };
    record("combined_loss_wrt_head",
           finite_diff_check(models.g_sup, probe, gen), 1e-4);
  }

  return results;
}

}  // namespace ivgan

#endif  // IVGAN_GRADCHECK_HPP_
