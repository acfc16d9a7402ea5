// ivgan/gan.hpp

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

#ifndef IVGAN_GAN_HPP_
#define IVGAN_GAN_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "ivgan/common.hpp"
#include "ivgan/nn.hpp"
#include "ivgan/optim.hpp"
#include "ivgan/rng.hpp"
#include "ivgan/synthcorpus.hpp"
#include "ivgan/vecspace.hpp"

namespace ivgan {

// Conditional Wasserstein GAN with a multi-task generator objective:
// weight a on the adversarial term, b on cosine distance to the reliable
// target, c on speaker cross-entropy through the auxiliary head.
struct GanConfig {
  int noise_dim = 50;
  double noise_sigma = 0.5;
  int batch_size = 64;
  double lr = 1e-4;
  double clip_c = 0.01;
  double a = 4.0;
  double b = 7.0;
  double c = 1.0;
  int n_critic = 5;
  int epochs = 10;
  int num_speakers = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (noise_dim < 1) throw ConfigError("gan: noise_dim must be >= 1");
    if (!(noise_sigma > 0.0)) throw ConfigError("gan: noise_sigma must be > 0");
    if (batch_size < 1) throw ConfigError("gan: batch_size must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("gan: lr must be > 0");
    if (!(clip_c > 0.0)) throw ConfigError("gan: clip_c must be > 0");
    if (a < 0.0 || b < 0.0 || c < 0.0)
      throw ConfigError("gan: loss weights must be >= 0");
    if (a == 0.0 && b == 0.0 && c == 0.0)
      throw ConfigError("gan: at least one loss weight must be positive");
    if (n_critic < 1) throw ConfigError("gan: n_critic must be >= 1");
    if (epochs < 0) throw ConfigError("gan: epochs must be >= 0");
    if (num_speakers < 1) throw ConfigError("gan: num_speakers must be >= 1");
  }
};

struct GanModels {
  Mlp g;      // (dim + noise_dim) -> dim, tanh output
  Mlp g_sup;  // dim -> num_speakers, softmax output
  Mlp d;      // 2*dim -> 1, linear output
};

struct EpochRecord {
  double critic_objective = 0.0;  // mean critic gap over the epoch's updates
  double g_adv_loss = 0.0;
  double cosine_loss = 0.0;
  double ce_loss = 0.0;
  double combined_loss = 0.0;
  double heldout_mean_cos = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

constexpr int kHiddenWidth = 512;

/// G: [dim+noise, 512, 512, 512, dim] with tanh output; G_sup one hidden
/// layer as wide as the speaker count, softmax output; D: four 512 hidden
/// layers over two concatenated vectors, one linear output node.
inline GanModels build_models(int dim, const GanConfig& config) {
  if (dim < 1) throw ConfigError("build_models: dim must be >= 1");
  config.validate();
  Rng seeder(derive_seed(config.seed, 0x6d6f64656c73ULL));
  std::uint64_t sg = seeder.next_u64(), ss = seeder.next_u64(),
                sd = seeder.next_u64();

  GanModels m;
  m.g = init_mlp({dim + config.noise_dim, kHiddenWidth, kHiddenWidth,
                  kHiddenWidth, dim},
                 {Activation::kLeakyRelu, Activation::kLeakyRelu,
                  Activation::kLeakyRelu, Activation::kTanh},
                 sg);
  m.g_sup = init_mlp({dim, config.num_speakers, config.num_speakers},
                     {Activation::kLeakyRelu, Activation::kSoftmax}, ss);
  m.d = init_mlp({2 * dim, kHiddenWidth, kHiddenWidth, kHiddenWidth,
                  kHiddenWidth, 1},
                 {Activation::kLeakyRelu, Activation::kLeakyRelu,
                  Activation::kLeakyRelu, Activation::kLeakyRelu,
                  Activation::kLinear},
                 sd);
  return m;
}

/// count x noise_dim of i.i.d. N(0, noise_sigma^2) draws.
inline Mat sample_noise(int count, const GanConfig& config, Rng& rng) {
  if (count < 1) throw ConfigError("sample_noise: count must be >= 1");
  return config.noise_sigma * rng.gaussian_mat(count, config.noise_dim);
}

namespace detail {

inline Mat concat_cols(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw DataError("concat: row count mismatch");
  Mat out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace detail

/// G applied to [x || z] row-wise.
inline Mat g_forward(const GanModels& models, const Mat& x_batch,
                     const Mat& z_batch) {
  return forward_output(models.g, detail::concat_cols(x_batch, z_batch));
}

/// Mean over the batch of D(y|x) - D(yhat|x); the quantity the critic
/// ascends.
inline double critic_objective(const GanModels& models, const Mat& x_batch,
                               const Mat& y_batch, const Mat& yhat_batch) {
  if (x_batch.rows() != y_batch.rows() || x_batch.rows() != yhat_batch.rows())
    throw DataError("critic_objective: batch size mismatch");
  Mat real = forward_output(models.d, detail::concat_cols(x_batch, y_batch));
  Mat fake = forward_output(models.d, detail::concat_cols(x_batch, yhat_batch));
  return real.mean() - fake.mean();
}

/// -mean(D(G(z|x)|x)): what the generator descends on the adversarial task.
inline double g_adversarial_loss(const GanModels& models, const Mat& x_batch,
                                 const Mat& z_batch) {
  Mat gen = g_forward(models, x_batch, z_batch);
  Mat score = forward_output(models.d, detail::concat_cols(x_batch, gen));
  return -score.mean();
}

/// Mean over the batch of 1 - cos(generated row, target row).
inline double cosine_loss(const Mat& generated, const Mat& target) {
  if (generated.rows() != target.rows() || generated.cols() != target.cols())
    throw DataError("cosine_loss: shape mismatch");
  double total = 0.0;
  for (Eigen::Index r = 0; r < generated.rows(); ++r) {
    double ng = generated.row(r).norm();
    double nt = target.row(r).norm();
    if (ng == 0.0)
      throw DivergenceError("cosine_loss: zero-norm generated row");
    if (nt == 0.0) throw DataError("cosine_loss: zero-norm target row");
    total += 1.0 - generated.row(r).dot(target.row(r)) / (ng * nt);
  }
  return total / generated.rows();
}

/// Mean of -log G_sup(generated)[label].
inline double ce_loss(const GanModels& models, const Mat& generated,
                      const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != generated.rows())
    throw DataError("ce_loss: label count mismatch");
  Mat probs = forward_output(models.g_sup, generated);
  const int k = static_cast<int>(probs.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    if (labels[r] < 0 || labels[r] >= k)
      throw DataError("ce_loss: label out of range");
    total += -std::log(std::max(probs(r, labels[r]), 1e-300));
  }
  return total / probs.rows();
}

/// a*adv + (b*cos + c*ce); the grouping keeps the adversarial term exactly
/// separable from the rest.
inline double combined_g_loss(double g_adv, double cos, double ce,
                              const GanConfig& config) {
  return config.a * g_adv + (config.b * cos + config.c * ce);
}

enum class StepKind { kCriticUpdate, kGeneratorUpdate };
using StepCallback =
    std::function<void(StepKind, int epoch, const GanModels& models)>;

namespace detail {

struct CosGrad {
  double value = 0.0;
  Mat grad;  // dloss/dgenerated
};

inline CosGrad cosine_loss_grad(const Mat& generated, const Mat& target) {
  CosGrad out;
  out.grad.resize(generated.rows(), generated.cols());
  const double inv_n = 1.0 / generated.rows();
  for (Eigen::Index r = 0; r < generated.rows(); ++r) {
    double ng = generated.row(r).norm();
    double nt = target.row(r).norm();
    if (ng == 0.0)
      throw DivergenceError("cosine_loss: zero-norm generated row");
    if (nt == 0.0) throw DataError("cosine_loss: zero-norm target row");
    double dot = generated.row(r).dot(target.row(r));
    double cosine = dot / (ng * nt);
    out.value += (1.0 - cosine) * inv_n;
    // d(1-cos)/dg = -(t/(|g||t|) - cos * g/|g|^2)
    out.grad.row(r) =
        -inv_n * (target.row(r) / (ng * nt) -
                  cosine * generated.row(r) / (ng * ng));
  }
  return out;
}

struct CeGrad {
  double value = 0.0;
  Mat input_grad;      // dloss/dgenerated
  Gradients sup_grads; // dloss/dtheta_{G_sup}
};

inline CeGrad ce_loss_grad(const Mlp& g_sup, const Mat& generated,
                           const std::vector<int>& labels) {
  ForwardCache cache = forward(g_sup, generated);
  const Mat& probs = cache.output();
  const int k = static_cast<int>(probs.cols());
  CeGrad out;
  Mat upstream = Mat::Zero(probs.rows(), probs.cols());
  const double inv_n = 1.0 / probs.rows();
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    if (labels[r] < 0 || labels[r] >= k)
      throw DataError("ce_loss: label out of range");
    double p = std::max(probs(r, labels[r]), 1e-300);
    out.value += -std::log(p) * inv_n;
    upstream(r, labels[r]) = -inv_n / p;
  }
  BackwardResult back = backward(g_sup, cache, upstream);
  out.input_grad = std::move(back.input_grad);
  out.sup_grads = std::move(back.grads);
  return out;
}

struct AdvGrad {
  double value = 0.0;
  Mat gen_grad;  // d(-mean D)/dgenerated, critic frozen
};

inline AdvGrad adv_loss_grad(const Mlp& d_net, const Mat& x_batch,
                             const Mat& generated) {
  ForwardCache cache = forward(d_net, concat_cols(x_batch, generated));
  AdvGrad out;
  out.value = -cache.output().mean();
  Mat upstream = Mat::Constant(cache.output().rows(), 1,
                               -1.0 / cache.output().rows());
  BackwardResult back =
      backward(d_net, cache, upstream, /*need_param_grads=*/false);
  out.gen_grad = back.input_grad.rightCols(generated.cols());
  return out;
}

inline void scale_gradients(Gradients& g, double s) {
  for (auto& m : g.w) m *= s;
  for (auto& v : g.b) v *= s;
}

}  // namespace detail

// Noise policy at transformation time: all-zero noise (deterministic) or
// the mean of num_samples sampled-noise outputs.
struct TransformPolicy {
  enum class Kind { kZeroNoise, kAverage };
  Kind kind = Kind::kZeroNoise;
  int num_samples = 1;
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;
};

/// Row-wise transform of short-utterance vectors: length_normalize(G([x||z]))
/// with z per policy.
inline Mat transform_batch(const Mlp& g, const Mat& rows,
                           const TransformPolicy& policy = {}) {
  const int noise_dim = g.input_dim() - static_cast<int>(rows.cols());
  if (noise_dim < 1)
    throw DataError("transform: vector width incompatible with generator");
  Mat out;
  if (policy.kind == TransformPolicy::Kind::kZeroNoise) {
    out = forward_output(
        g, detail::concat_cols(rows, Mat::Zero(rows.rows(), noise_dim)));
  } else {
    if (policy.num_samples < 1)
      throw ConfigError("transform: num_samples must be >= 1");
    Rng rng(policy.seed);
    out = Mat::Zero(rows.rows(), g.output_dim());
    for (int s = 0; s < policy.num_samples; ++s) {
      Mat z = policy.noise_sigma * rng.gaussian_mat(static_cast<int>(rows.rows()),
                                                    noise_dim);
      out += forward_output(g, detail::concat_cols(rows, z));
    }
    out /= policy.num_samples;
  }
  length_normalize_rows(out);
  return out;
}

inline IVector transform_ivector(const Mlp& g, const IVector& x,
                                 const TransformPolicy& policy = {}) {
  Mat row = x.transpose();
  return transform_batch(g, row, policy).row(0).transpose();
}

inline IVector transform_ivector(const GanModels& models, const IVector& x,
                                 const TransformPolicy& policy = {}) {
  return transform_ivector(models.g, x, policy);
}

/// Trains the conditional WGAN. Per generator step: n_critic critic updates
/// on sampled batches (ascend the critic gap, then clip), then one joint
/// G/G_sup update descending the combined loss. An epoch is one pass of the
/// generator over the shuffled pairs. With a == 0 the critic is dropped
/// entirely (the "Single G" ablation). heldout, when non-empty, supplies
/// the per-epoch held-out cosine metric; otherwise the training pairs are
/// reused for it.
inline std::pair<GanModels, TrainHistory> train_gan(
    const std::vector<UtterancePair>& pairs, const GanConfig& config,
    const std::vector<UtterancePair>& heldout = {},
    const StepCallback& callback = nullptr) {
  config.validate();
  if (pairs.size() < static_cast<std::size_t>(config.batch_size))
    throw DataError("train_gan: fewer pairs than batch_size");
  const int dim = static_cast<int>(pairs.front().short_vec.size());
  const int n_pairs = static_cast<int>(pairs.size());

  Mat x_all(n_pairs, dim), y_all(n_pairs, dim);
  std::vector<int> labels(n_pairs);
  for (int i = 0; i < n_pairs; ++i) {
    const UtterancePair& p = pairs[i];
    if (p.short_vec.size() != dim || p.long_vec.size() != dim)
      throw DataError("train_gan: inconsistent pair dimensions");
    if (p.speaker < 0 || p.speaker >= config.num_speakers)
      throw DataError("train_gan: speaker label out of range");
    if (std::abs(p.short_vec.norm() - 1.0) > 1e-6 ||
        std::abs(p.long_vec.norm() - 1.0) > 1e-6)
      throw DataError("train_gan: pair vectors must be length-normalized");
    x_all.row(i) = p.short_vec.transpose();
    y_all.row(i) = p.long_vec.transpose();
    labels[i] = p.speaker;
  }

  GanModels models = build_models(dim, config);
  RmsPropState g_state = RmsPropState::for_net(models.g);
  RmsPropState sup_state = RmsPropState::for_net(models.g_sup);
  RmsPropState d_state = RmsPropState::for_net(models.d);
  Rng rng(derive_seed(config.seed, 0x747261696eULL));

  TrainHistory history;
  const int B = config.batch_size;
  const int chunks = n_pairs / B;
  const bool use_critic = config.a > 0.0;

  Mat held_x, held_y;
  {
    const std::vector<UtterancePair>& src = heldout.empty() ? pairs : heldout;
    held_x.resize(src.size(), dim);
    held_y.resize(src.size(), dim);
    for (std::size_t i = 0; i < src.size(); ++i) {
      held_x.row(i) = src[i].short_vec.transpose();
      held_y.row(i) = src[i].long_vec.transpose();
    }
  }

  std::vector<int> order(n_pairs);
  for (int i = 0; i < n_pairs; ++i) order[i] = i;

  auto gather = [&](const std::vector<int>& idx, Mat& x, Mat& y,
                    std::vector<int>& lab) {
    x.resize(idx.size(), dim);
    y.resize(idx.size(), dim);
    lab.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      x.row(i) = x_all.row(idx[i]);
      y.row(i) = y_all.row(idx[i]);
      lab[i] = labels[idx[i]];
    }
  };

  Mat bx, by, z;
  std::vector<int> bidx(B), blab;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double sum_critic = 0.0, sum_adv = 0.0, sum_cos = 0.0, sum_ce = 0.0,
           sum_combined = 0.0;
    int critic_updates = 0;

    for (int chunk = 0; chunk < chunks; ++chunk) {
      if (use_critic) {
        for (int t = 0; t < config.n_critic; ++t) {
          for (int i = 0; i < B; ++i) bidx[i] = rng.uniform_int(n_pairs);
          gather(bidx, bx, by, blab);
          z = sample_noise(B, config, rng);
          Mat yhat = g_forward(models, bx, z);

          // Single pass over [real; fake]; ascend mean(real) - mean(fake)
          // by descending its negation.
          Mat d_in(2 * B, 2 * dim);
          d_in.topRows(B) = detail::concat_cols(bx, by);
          d_in.bottomRows(B) = detail::concat_cols(bx, yhat);
          ForwardCache cache = forward(models.d, d_in);
          double objective =
              cache.output().topRows(B).mean() -
              cache.output().bottomRows(B).mean();
          Mat upstream(2 * B, 1);
          upstream.topRows(B).setConstant(-1.0 / B);
          upstream.bottomRows(B).setConstant(1.0 / B);
          BackwardResult back = backward(models.d, cache, upstream);
          rmsprop_step(models.d, back.grads, d_state, config.lr);
          clip_parameters(models.d, config.clip_c);

          sum_critic += objective;
          ++critic_updates;
          if (callback) callback(StepKind::kCriticUpdate, epoch, models);
        }
      }

      // Generator batch: the next slice of the shuffled pass.
      std::vector<int> gidx(order.begin() + chunk * B,
                            order.begin() + (chunk + 1) * B);
      gather(gidx, bx, by, blab);
      z = sample_noise(B, config, rng);

      ForwardCache g_cache = forward(models.g, detail::concat_cols(bx, z));
      const Mat& generated = g_cache.output();

      double adv_value = 0.0;
      Mat total_grad = Mat::Zero(B, dim);
      if (use_critic) {
        detail::AdvGrad adv = detail::adv_loss_grad(models.d, bx, generated);
        adv_value = adv.value;
        total_grad += config.a * adv.gen_grad;
      }
      detail::CosGrad cos = detail::cosine_loss_grad(generated, by);
      total_grad += config.b * cos.grad;
      detail::CeGrad ce = detail::ce_loss_grad(models.g_sup, generated, blab);
      if (config.c > 0.0) total_grad += config.c * ce.input_grad;

      BackwardResult g_back = backward(models.g, g_cache, total_grad);
      rmsprop_step(models.g, g_back.grads, g_state, config.lr);
      if (config.c > 0.0) {
        detail::scale_gradients(ce.sup_grads, config.c);
        rmsprop_step(models.g_sup, ce.sup_grads, sup_state, config.lr);
      }
      if (callback) callback(StepKind::kGeneratorUpdate, epoch, models);

      double combined = combined_g_loss(adv_value, cos.value, ce.value, config);
      if (!std::isfinite(combined))
        throw DivergenceError("train_gan: non-finite loss at epoch " +
                              std::to_string(epoch));
      sum_adv += adv_value;
      sum_cos += cos.value;
      sum_ce += ce.value;
      sum_combined += combined;
    }

    EpochRecord rec;
    rec.critic_objective =
        critic_updates > 0 ? sum_critic / critic_updates : 0.0;
    rec.g_adv_loss = chunks > 0 ? sum_adv / chunks : 0.0;
    rec.cosine_loss = chunks > 0 ? sum_cos / chunks : 0.0;
    rec.ce_loss = chunks > 0 ? sum_ce / chunks : 0.0;
    rec.combined_loss = chunks > 0 ? sum_combined / chunks : 0.0;
    {
      Mat transformed = transform_batch(models.g, held_x);
      double total = 0.0;
      for (Eigen::Index r = 0; r < transformed.rows(); ++r)
        total += 1.0 - transformed.row(r).dot(held_y.row(r)) /
                           (transformed.row(r).norm() * held_y.row(r).norm());
      rec.heldout_mean_cos = total / transformed.rows();
    }
    if (!std::isfinite(rec.heldout_mean_cos))
      throw DivergenceError("train_gan: non-finite held-out metric at epoch " +
                            std::to_string(epoch));
    history.epochs.push_back(rec);
  }

  return {std::move(models), std::move(history)};
}

}  // namespace ivgan

#endif  // IVGAN_GAN_HPP_
