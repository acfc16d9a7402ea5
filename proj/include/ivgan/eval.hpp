// ivgan/eval.hpp

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

#ifndef IVGAN_EVAL_HPP_
#define IVGAN_EVAL_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ivgan/common.hpp"
#include "ivgan/gan.hpp"
#include "ivgan/plda.hpp"
#include "ivgan/synthcorpus.hpp"

namespace ivgan {

struct TrialScore {
  std::string enroll_ref;
  std::string test_ref;
  bool is_target = false;
  double score = 0.0;
};

struct ScoredTrialSet {
  std::string condition;
  std::vector<TrialScore> entries;

  void validate() const {
    bool has_target = false, has_nontarget = false;
    for (const TrialScore& t : entries) {
      if (!std::isfinite(t.score))
        throw DataError("ScoredTrialSet: non-finite score");
      (t.is_target ? has_target : has_nontarget) = true;
    }
    if (!has_target || !has_nontarget)
      throw DataError(
          "ScoredTrialSet: needs at least one target and one nontarget");
  }
};

// NIST-style detection cost parameters. The defaults are the SRE08 cost
// model; reports must echo the values actually used.
struct DcfParams {
  double c_miss = 10.0;
  double c_fa = 1.0;
  double p_target = 0.01;

  void validate() const {
    if (!(c_miss > 0.0) || !(c_fa > 0.0))
      throw ConfigError("DcfParams: costs must be positive");
    if (!(p_target > 0.0 && p_target < 1.0))
      throw ConfigError("DcfParams: p_target must be in (0,1)");
  }
};

struct OperatingPoint {
  double threshold = 0.0;  // +inf marks the reject-everything point
  double p_fa = 0.0;
  double p_miss = 0.0;
};

/// One operating point per distinct threshold (accept iff score >=
/// threshold), ascending in threshold, plus the reject-all endpoint.
/// P_fa is non-increasing and P_miss non-decreasing along the output;
/// the first point is (1, 0) and the last is (0, 1).
inline std::vector<OperatingPoint> det_points(const ScoredTrialSet& s) {
  s.validate();
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(s.entries.size());
  int targets = 0, nontargets = 0;
  for (const TrialScore& t : s.entries) {
    sorted.emplace_back(t.score, t.is_target);
    (t.is_target ? targets : nontargets)++;
  }
  std::sort(sorted.begin(), sorted.end());

  std::vector<OperatingPoint> points;
  std::size_t i = 0;
  int targets_below = 0, nontargets_below = 0;
  while (i < sorted.size()) {
    double v = sorted[i].first;
    points.push_back({v,
                      static_cast<double>(nontargets - nontargets_below) /
                          nontargets,
                      static_cast<double>(targets_below) / targets});
    while (i < sorted.size() && sorted[i].first == v) {
      (sorted[i].second ? targets_below : nontargets_below)++;
      ++i;
    }
  }
  points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  return points;
}

/// EER = (P_miss + P_fa)/2 at the threshold minimizing |P_miss - P_fa|,
/// ties resolved toward the lower threshold.
inline double compute_eer(const ScoredTrialSet& s) {
  std::vector<OperatingPoint> points = det_points(s);
  double best_gap = std::numeric_limits<double>::infinity();
  double eer = 0.0;
  for (const OperatingPoint& p : points) {
    double gap = std::abs(p.p_miss - p.p_fa);
    if (gap < best_gap) {
      best_gap = gap;
      eer = 0.5 * (p.p_miss + p.p_fa);
    }
  }
  return eer;
}

/// Normalized minimum detection cost: min over thresholds of
/// (c_miss*P_miss*p_t + c_fa*P_fa*(1-p_t)) / min(c_miss*p_t, c_fa*(1-p_t)).
inline double compute_min_dcf(const ScoredTrialSet& s, const DcfParams& p) {
  p.validate();
  std::vector<OperatingPoint> points = det_points(s);
  double norm = std::min(p.c_miss * p.p_target, p.c_fa * (1.0 - p.p_target));
  double best = std::numeric_limits<double>::infinity();
  for (const OperatingPoint& op : points) {
    double cost = p.c_miss * op.p_miss * p.p_target +
                  p.c_fa * op.p_fa * (1.0 - p.p_target);
    best = std::min(best, cost / norm);
  }
  return best;
}

namespace detail {

inline std::vector<double> znorm_scores(const ScoredTrialSet& s) {
  std::vector<double> out(s.entries.size());
  double mean = 0.0;
  for (const TrialScore& t : s.entries) mean += t.score;
  mean /= s.entries.size();
  double var = 0.0;
  for (const TrialScore& t : s.entries) var += (t.score - mean) * (t.score - mean);
  var /= s.entries.size();
  double sd = std::sqrt(var);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = sd > 0.0 ? (s.entries[i].score - mean) / sd : 0.0;
  return out;
}

}  // namespace detail

/// Weighted sum of two systems' scores over the same trial list. Each
/// system is shifted/scaled to zero mean, unit variance first (disable
/// with normalize=false); weights are renormalized to sum to one.
inline ScoredTrialSet fuse_scores(const ScoredTrialSet& base,
                                  const ScoredTrialSet& other, double w_base,
                                  double w_other, bool normalize = true) {
  if (base.entries.size() != other.entries.size())
    throw DataError("fuse_scores: trial count mismatch");
  if (w_base < 0.0 || w_other < 0.0 || w_base + w_other <= 0.0)
    throw ConfigError("fuse_scores: weights must be >= 0 and not both zero");
  for (std::size_t i = 0; i < base.entries.size(); ++i) {
    const TrialScore& a = base.entries[i];
    const TrialScore& b = other.entries[i];
    if (a.is_target != b.is_target ||
        (!a.enroll_ref.empty() && !b.enroll_ref.empty() &&
         (a.enroll_ref != b.enroll_ref || a.test_ref != b.test_ref)))
      throw DataError("fuse_scores: trial misalignment at row " +
                      std::to_string(i));
  }
  base.validate();
  other.validate();

  double wa = w_base / (w_base + w_other);
  double wb = w_other / (w_base + w_other);
  std::vector<double> sa, sb;
  if (normalize) {
    sa = detail::znorm_scores(base);
    sb = detail::znorm_scores(other);
  } else {
    for (const TrialScore& t : base.entries) sa.push_back(t.score);
    for (const TrialScore& t : other.entries) sb.push_back(t.score);
  }

  ScoredTrialSet fused;
  fused.condition = base.condition;
  fused.entries = base.entries;
  for (std::size_t i = 0; i < fused.entries.size(); ++i)
    fused.entries[i].score = wa * sa[i] + wb * sb[i];
  return fused;
}

enum class EvalMode { kBaseline, kLongShort, kShortShort };

inline const char* eval_mode_name(EvalMode m) {
  switch (m) {
    case EvalMode::kBaseline: return "baseline";
    case EvalMode::kLongShort: return "long-short";
    case EvalMode::kShortShort: return "short-short";
  }
  return "?";
}
inline EvalMode eval_mode_from_name(const std::string& s) {
  if (s == "baseline") return EvalMode::kBaseline;
  if (s == "long-short") return EvalMode::kLongShort;
  if (s == "short-short") return EvalMode::kShortShort;
  throw ConfigError("unknown eval mode: " + s);
}

struct ConditionResult {
  ScoredTrialSet scores;
  double eer = 0.0;
  double min_dcf = 0.0;
  // Number of transform_ivector applications, for auditing: one per trial
  // side that the mode transforms.
  std::size_t transforms_applied = 0;
};

/// Scores a trial list with the PLDA back-end. "baseline" scores the raw
/// vectors; "long-short" transforms the test side only; "short-short"
/// transforms both sides.
inline ConditionResult evaluate_condition(const Corpus& corpus,
                                          const TrialList& trials,
                                          const PldaModel& plda,
                                          const Mlp* generator, EvalMode mode,
                                          const DcfParams& dcf = {},
                                          const TransformPolicy& policy = {}) {
  trials.validate();
  if (mode != EvalMode::kBaseline && generator == nullptr)
    throw ConfigError("evaluate_condition: mode requires a trained generator");
  if (mode == EvalMode::kLongShort && trials.mode != TrialMode::kLongShort)
    throw ConfigError("evaluate_condition: trial list is not long-short");
  if (mode == EvalMode::kShortShort && trials.mode != TrialMode::kShortShort)
    throw ConfigError("evaluate_condition: trial list is not short-short");

  const int n = static_cast<int>(trials.entries.size());
  const int d = corpus.dim();
  Mat enroll(n, d), test(n, d);
  for (int i = 0; i < n; ++i) {
    enroll.row(i) = trials.entries[i].enroll.resolve(corpus).transpose();
    test.row(i) = trials.entries[i].test.resolve(corpus).transpose();
  }

  ConditionResult result;
  if (mode == EvalMode::kLongShort || mode == EvalMode::kShortShort) {
    test = transform_batch(*generator, test, policy);
    result.transforms_applied += n;
  }
  if (mode == EvalMode::kShortShort) {
    enroll = transform_batch(*generator, enroll, policy);
    result.transforms_applied += n;
  }

  PldaScorer scorer(plda);
  result.scores.condition = std::string(trial_mode_name(trials.mode)) + "/" +
                            eval_mode_name(mode);
  result.scores.entries.resize(n);
  for (int i = 0; i < n; ++i) {
    TrialScore& t = result.scores.entries[i];
    t.enroll_ref = trials.entries[i].enroll.str(corpus);
    t.test_ref = trials.entries[i].test.str(corpus);
    t.is_target = trials.entries[i].is_target;
    t.score = scorer.llr(enroll.row(i).transpose(), test.row(i).transpose());
  }
  result.eer = compute_eer(result.scores);
  result.min_dcf = compute_min_dcf(result.scores, dcf);
  return result;
}

}  // namespace ivgan

#endif  // IVGAN_EVAL_HPP_
