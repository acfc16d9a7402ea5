// ivgan/plda.hpp

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

#ifndef IVGAN_PLDA_HPP_
#define IVGAN_PLDA_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "ivgan/common.hpp"
#include "ivgan/rng.hpp"

namespace ivgan {

// Two-covariance PLDA: w = mean + V*y + eps with y ~ N(0, I_q) shared per
// speaker and eps ~ N(0, residual_cov). The eigenchannel term of the usual
// formulation is absorbed into the full residual covariance, the standard
// simplification for length-normalized i-vectors.
struct PldaModel {
  Vec mean;
  Mat speaker_subspace;  // dim x q
  Mat residual_cov;      // dim x dim, SPD

  int dim() const { return static_cast<int>(mean.size()); }
  int q() const { return static_cast<int>(speaker_subspace.cols()); }

  void validate() const {
    if (dim() < 1) throw ConfigError("PldaModel: empty mean");
    if (speaker_subspace.rows() != dim() || residual_cov.rows() != dim() ||
        residual_cov.cols() != dim())
      throw ConfigError("PldaModel: shape mismatch");
    if ((residual_cov - residual_cov.transpose()).cwiseAbs().maxCoeff() >
        1e-10)
      throw DataError("PldaModel: residual covariance not symmetric");
    Eigen::LLT<Mat> llt(residual_cov);
    if (llt.info() != Eigen::Success)
      throw DataError("PldaModel: residual covariance not positive definite");
    if (q() > 0) {
      Mat gram = speaker_subspace.transpose() * speaker_subspace;
      Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
      double max_ev = eig.eigenvalues().maxCoeff();
      if (max_ev <= 0.0 || eig.eigenvalues().minCoeff() <= 1e-12 * max_ev)
        throw DataError("PldaModel: speaker subspace is column-rank deficient");
    }
    if (q() > dim()) throw ConfigError("PldaModel: q exceeds dim");
  }
};

namespace detail {

inline double logdet_from_llt(const Eigen::LLT<Mat>& llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace detail

// Precomputed scoring state: same/different-speaker log-likelihood ratios
// reduce to two small quadratic forms once V' Sigma^-1 and the q x q
// posterior precisions are factored.
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel& m) : mean_(m.mean) {
    m.validate();
    const int d = m.dim(), q = m.q();
    Eigen::LLT<Mat> sigma_llt(m.residual_cov);
    lambda_ = sigma_llt.solve(Mat::Identity(d, d));
    vt_lambda_ = m.speaker_subspace.transpose() * lambda_;
    Mat gram = vt_lambda_ * m.speaker_subspace;  // V' Sigma^-1 V
    Mat p1 = Mat::Identity(q, q) + gram;
    Mat p2 = Mat::Identity(q, q) + 2.0 * gram;
    p1_llt_.compute(p1);
    p2_llt_.compute(p2);
    if (q > 0 && (p1_llt_.info() != Eigen::Success ||
                  p2_llt_.info() != Eigen::Success))
      throw DataError("PldaScorer: posterior precision not PD");
    logdet_p1_ = q > 0 ? detail::logdet_from_llt(p1_llt_) : 0.0;
    logdet_p2_ = q > 0 ? detail::logdet_from_llt(p2_llt_) : 0.0;
  }

  int dim() const { return static_cast<int>(mean_.size()); }

  double llr(const Vec& enroll, const Vec& test) const {
    if (enroll.size() != mean_.size() || test.size() != mean_.size())
      throw DataError("plda_llr: dimension mismatch");
    if (vt_lambda_.rows() == 0) return 0.0;  // q == 0: hypotheses coincide
    Vec ga = vt_lambda_ * (enroll - mean_);
    Vec gb = vt_lambda_ * (test - mean_);
    Vec gf = ga + gb;
    double qa = ga.dot(p1_llt_.solve(ga));
    double qb = gb.dot(p1_llt_.solve(gb));
    double qf = gf.dot(p2_llt_.solve(gf));
    return -0.5 * (logdet_p2_ - 2.0 * logdet_p1_ - qf + qa + qb);
  }

 private:
  Vec mean_;
  Mat lambda_;      // Sigma^-1
  Mat vt_lambda_;   // q x dim
  Eigen::LLT<Mat> p1_llt_, p2_llt_;
  double logdet_p1_ = 0.0, logdet_p2_ = 0.0;
};

/// log p(enroll, test | same speaker) - log p(enroll, test | different
/// speakers). One-shot convenience; use PldaScorer for bulk scoring.
inline double plda_llr(const PldaModel& m, const Vec& enroll,
                       const Vec& test) {
  return PldaScorer(m).llr(enroll, test);
}

/// Verification oracle: evaluates both hypothesis likelihoods by stacking
/// the two vectors into an explicit 2d-dimensional Gaussian and computing
/// the log-densities directly. Deliberately avoids the Woodbury route the
/// scorer uses. Guarded to small dims.
inline double llr_density_oracle(const PldaModel& m, const Vec& enroll,
                                 const Vec& test) {
  const int d = m.dim();
  if (d > 16) throw ConfigError("llr_density_oracle: dim must be <= 16");
  if (enroll.size() != d || test.size() != d)
    throw DataError("llr_density_oracle: dimension mismatch");

  Mat between = m.speaker_subspace * m.speaker_subspace.transpose();
  Mat within = m.residual_cov;
  Mat total = between + within;

  auto log_density = [](const Vec& x, const Vec& mu, const Mat& cov) {
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success)
      throw DataError("llr_density_oracle: joint covariance not PD");
    Vec u = x - mu;
    double quad = u.dot(llt.solve(u));
    return -0.5 * (x.size() * std::log(2.0 * M_PI) +
                   detail::logdet_from_llt(llt) + quad);
  };

  Vec stacked(2 * d);
  stacked << enroll, test;
  Vec mu(2 * d);
  mu << m.mean, m.mean;

  Mat c_same(2 * d, 2 * d);
  c_same.topLeftCorner(d, d) = total;
  c_same.bottomRightCorner(d, d) = total;
  c_same.topRightCorner(d, d) = between;
  c_same.bottomLeftCorner(d, d) = between;

  Mat c_diff = Mat::Zero(2 * d, 2 * d);
  c_diff.topLeftCorner(d, d) = total;
  c_diff.bottomRightCorner(d, d) = total;

  return log_density(stacked, mu, c_same) - log_density(stacked, mu, c_diff);
}

struct PldaTrainReport {
  std::vector<double> log_likelihoods;  // one entry per EM iteration
};

/// EM estimation of (V, residual_cov) with the mean fixed at the global
/// sample mean. Initialization is PCA of the between-speaker means; the
/// seed only breaks ties when the between-speaker scatter cannot fill q
/// directions.
inline PldaModel train_plda(const Mat& vectors, const std::vector<int>& labels,
                            int q, int iterations, std::uint64_t seed,
                            PldaTrainReport* report = nullptr) {
  const int n = static_cast<int>(vectors.rows());
  const int d = static_cast<int>(vectors.cols());
  if (n == 0 || d == 0) throw DataError("train_plda: empty data");
  if (static_cast<int>(labels.size()) != n)
    throw DataError("train_plda: labels/vectors count mismatch");
  if (q < 1 || q > d)
    throw ConfigError("train_plda: need 1 <= q <= dim");
  if (iterations < 1) throw ConfigError("train_plda: iterations must be >= 1");

  // Group by speaker.
  std::map<int, std::vector<int>> by_speaker;
  for (int i = 0; i < n; ++i) by_speaker[labels[i]].push_back(i);
  if (by_speaker.size() < 2)
    throw DataError("train_plda: need at least 2 speakers");
  bool any_multi = false;
  for (const auto& [spk, idx] : by_speaker) any_multi |= idx.size() >= 2;
  if (!any_multi)
    throw DataError(
        "train_plda: every speaker has a single vector; between-class "
        "variability is unidentifiable");

  Vec mean = vectors.colwise().mean().transpose();
  Mat centered = vectors.rowwise() - mean.transpose();
  Mat scatter = centered.transpose() * centered;  // d x d

  const int num_spk = static_cast<int>(by_speaker.size());
  std::vector<int> counts;
  Mat sums(num_spk, d);  // f_s = sum of centered vectors of speaker s
  {
    int s = 0;
    for (const auto& [spk, idx] : by_speaker) {
      Vec f = Vec::Zero(d);
      for (int i : idx) f += centered.row(i).transpose();
      sums.row(s) = f.transpose();
      counts.push_back(static_cast<int>(idx.size()));
      ++s;
    }
  }

  // Between-speaker scatter of per-speaker means, weighted by counts.
  Mat between = Mat::Zero(d, d);
  for (int s = 0; s < num_spk; ++s) {
    Vec ms = sums.row(s).transpose() / counts[s];
    between += counts[s] * (ms * ms.transpose());
  }
  between /= n;

  Eigen::SelfAdjointEigenSolver<Mat> eig(between);
  if (eig.info() != Eigen::Success)
    throw DataError("train_plda: eigen decomposition failed");
  Mat v = Mat::Zero(d, q);
  Rng rng(seed);
  for (int k = 0; k < q; ++k) {
    int src = d - 1 - k;  // eigenvalues ascend in Eigen's solver
    double ev = src >= 0 ? eig.eigenvalues()(src) : 0.0;
    if (src >= 0 && ev > 1e-12) {
      v.col(k) = eig.eigenvectors().col(src) * std::sqrt(ev);
    } else {
      // Rank-starved: seed a small random direction instead.
      v.col(k) = 1e-3 * rng.gaussian_vec(d);
    }
  }

  // Within-class scatter as the starting residual covariance.
  Mat within = scatter;
  for (int s = 0; s < num_spk; ++s) {
    Vec ms = sums.row(s).transpose() / counts[s];
    within -= counts[s] * (ms * ms.transpose());
  }
  Mat sigma = within / n;
  {
    Eigen::LLT<Mat> check(sigma);
    if (check.info() != Eigen::Success)
      throw DataError(
          "train_plda: singular within-class covariance (insufficient data)");
  }

  if (report) report->log_likelihoods.clear();
  const double log2pi = std::log(2.0 * M_PI);

  for (int it = 0; it < iterations; ++it) {
    Eigen::LLT<Mat> sigma_llt(sigma);
    if (sigma_llt.info() != Eigen::Success)
      throw DataError(
          "train_plda: singular residual covariance (insufficient data)");
    Mat lambda = sigma_llt.solve(Mat::Identity(d, d));
    double logdet_sigma = detail::logdet_from_llt(sigma_llt);
    Mat vt_lambda = v.transpose() * lambda;  // q x d
    Mat gram = vt_lambda * v;                // q x q

    double ll = -0.5 * (n * d * log2pi + n * logdet_sigma +
                        (lambda.cwiseProduct(scatter)).sum());
    Mat r_acc = Mat::Zero(q, q);
    Mat t_acc = Mat::Zero(d, q);
    for (int s = 0; s < num_spk; ++s) {
      Mat p = Mat::Identity(q, q) + counts[s] * gram;
      Eigen::LLT<Mat> p_llt(p);
      if (p_llt.info() != Eigen::Success)
        throw DataError("train_plda: posterior precision not PD");
      Vec f = sums.row(s).transpose();
      Vec g = vt_lambda * f;
      Vec y_hat = p_llt.solve(g);
      ll -= 0.5 * (detail::logdet_from_llt(p_llt) - g.dot(y_hat));
      Mat p_inv = p_llt.solve(Mat::Identity(q, q));
      r_acc += counts[s] * (p_inv + y_hat * y_hat.transpose());
      t_acc += f * y_hat.transpose();
    }
    if (report) report->log_likelihoods.push_back(ll);

    // M-step.
    Eigen::LLT<Mat> r_llt(r_acc);
    if (r_llt.info() != Eigen::Success)
      throw DataError("train_plda: degenerate latent second moment");
    v = r_llt.solve(t_acc.transpose()).transpose();  // T R^-1
    sigma = (scatter - v * t_acc.transpose()) / n;
    sigma = 0.5 * (sigma + sigma.transpose());
  }

  PldaModel model;
  model.mean = mean;
  model.speaker_subspace = v;
  model.residual_cov = sigma;
  model.validate();
  return model;
}

}  // namespace ivgan

#endif  // IVGAN_PLDA_HPP_
