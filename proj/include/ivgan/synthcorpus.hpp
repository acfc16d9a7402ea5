// ivgan/synthcorpus.hpp

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

#ifndef IVGAN_SYNTHCORPUS_HPP_
#define IVGAN_SYNTHCORPUS_HPP_

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "ivgan/common.hpp"
#include "ivgan/rng.hpp"
#include "ivgan/vecspace.hpp"

namespace ivgan {

// Synthetic corpus layout. Each speaker has a latent identity vector; every
// long utterance is the identity plus mild noise, and every short segment
// carved from it adds a low-rank "phonetic bias" plus stronger isotropic
// noise. Short vectors are therefore systematically corrupted versions of
// their parent long vectors, which is what the generator learns to undo.
struct CorpusConfig {
  int dim = 50;
  int latent_dim = 10;
  int num_speakers = 100;
  int longs_per_speaker = 4;
  int segments_per_long = 5;
  int bias_rank = 5;
  double short_noise_scale = 0.3;
  double long_noise_scale = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    if (latent_dim < 1) throw ConfigError("corpus: latent_dim must be >= 1");
    if (dim < latent_dim)
      throw ConfigError("corpus: dim must be >= latent_dim");
    if (bias_rank < 0) throw ConfigError("corpus: bias_rank must be >= 0");
    if (num_speakers < 1 || longs_per_speaker < 1 || segments_per_long < 1)
      throw ConfigError("corpus: all counts must be >= 1");
    if (!(short_noise_scale > 0.0) || !(long_noise_scale > 0.0))
      throw ConfigError("corpus: noise scales must be positive");
    if (!(short_noise_scale > long_noise_scale))
      throw ConfigError(
          "corpus: short_noise_scale must exceed long_noise_scale");
  }
};

// A GAN training sample: a short-utterance vector, the long-utterance
// vector it was carved from, and their common speaker.
struct UtterancePair {
  Vec short_vec;
  Vec long_vec;
  int speaker = 0;
  // Provenance into the owning corpus, for disjointness audits.
  int short_index = -1;
  int long_index = -1;
};

struct Corpus {
  CorpusConfig config;
  Mat longs;   // num_longs x dim, unit rows; index s*L + l
  Mat shorts;  // num_shorts x dim, unit rows; index long_index*G + j

  int dim() const { return config.dim; }
  int num_longs() const { return static_cast<int>(longs.rows()); }
  int num_shorts() const { return static_cast<int>(shorts.rows()); }
  int num_pairs() const { return num_shorts(); }

  int long_speaker(int li) const { return li / config.longs_per_speaker; }
  int long_within_speaker(int li) const {
    return li % config.longs_per_speaker;
  }
  int short_parent(int si) const { return si / config.segments_per_long; }
  int short_segment(int si) const { return si % config.segments_per_long; }
  int short_speaker(int si) const { return long_speaker(short_parent(si)); }

  // Longs are split per speaker: the first ceil(L/2) feed GAN/PLDA
  // training, the rest are held out for trials.
  int train_longs_per_speaker() const {
    return (config.longs_per_speaker + 1) / 2;
  }
  bool is_train_long(int li) const {
    return long_within_speaker(li) < train_longs_per_speaker();
  }
  bool is_train_short(int si) const { return is_train_long(short_parent(si)); }
};

/// All (short, long, speaker) pairs whose long is in the training split.
inline std::vector<UtterancePair> training_pairs(const Corpus& c) {
  std::vector<UtterancePair> out;
  for (int si = 0; si < c.num_shorts(); ++si) {
    if (!c.is_train_short(si)) continue;
    int li = c.short_parent(si);
    out.push_back({c.shorts.row(si).transpose(), c.longs.row(li).transpose(),
                   c.short_speaker(si), si, li});
  }
  return out;
}

/// Pairs from the held-out longs; never seen by training.
inline std::vector<UtterancePair> heldout_pairs(const Corpus& c) {
  std::vector<UtterancePair> out;
  for (int si = 0; si < c.num_shorts(); ++si) {
    if (c.is_train_short(si)) continue;
    int li = c.short_parent(si);
    out.push_back({c.shorts.row(si).transpose(), c.longs.row(li).transpose(),
                   c.short_speaker(si), si, li});
  }
  return out;
}

inline Corpus generate_corpus(const CorpusConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const int d = config.dim;
  const int S = config.num_speakers;
  const int L = config.longs_per_speaker;
  const int G = config.segments_per_long;

  // Fixed mixing matrices, drawn once. The speaker part carries unit
  // per-component energy; the phonetic bias carries 4x that, which puts
  // the uncompensated short-short error rate in a realistic range.
  Mat v_spk = rng.gaussian_mat(d, config.latent_dim) /
              std::sqrt(static_cast<double>(config.latent_dim));
  Mat bias = config.bias_rank > 0
                 ? Mat(rng.gaussian_mat(d, config.bias_rank) *
                       (2.0 / std::sqrt(static_cast<double>(config.bias_rank))))
                 : Mat::Zero(d, 0);

  Corpus c;
  c.config = config;
  c.longs.resize(S * L, d);
  c.shorts.resize(S * L * G, d);

  for (int s = 0; s < S; ++s) {
    Vec h = rng.gaussian_vec(config.latent_dim);
    Vec identity = v_spk * h;
    for (int l = 0; l < L; ++l) {
      int li = s * L + l;
      Vec y_raw =
          identity + config.long_noise_scale * rng.gaussian_vec(d);
      c.longs.row(li) = y_raw.transpose();
      for (int j = 0; j < G; ++j) {
        Vec x_raw = y_raw;
        if (config.bias_rank > 0)
          x_raw += bias * rng.gaussian_vec(config.bias_rank);
        x_raw += config.short_noise_scale * rng.gaussian_vec(d);
        c.shorts.row(li * G + j) = x_raw.transpose();
      }
    }
  }
  length_normalize_rows(c.longs);
  length_normalize_rows(c.shorts);
  return c;
}

// Reference to one stored vector of a corpus.
struct VectorRef {
  bool is_long = false;
  int index = -1;

  Vec resolve(const Corpus& c) const {
    const Mat& m = is_long ? c.longs : c.shorts;
    if (index < 0 || index >= m.rows())
      throw DataError("VectorRef: index out of range");
    return m.row(index).transpose();
  }
  int speaker(const Corpus& c) const {
    return is_long ? c.long_speaker(index) : c.short_speaker(index);
  }
  std::string str(const Corpus& c) const {
    if (is_long) {
      return "spk" + std::to_string(c.long_speaker(index)) + "/long" +
             std::to_string(c.long_within_speaker(index));
    }
    int li = c.short_parent(index);
    return "spk" + std::to_string(c.long_speaker(li)) + "/long" +
           std::to_string(c.long_within_speaker(li)) + "/seg" +
           std::to_string(c.short_segment(index));
  }
  static VectorRef parse(const std::string& s, const Corpus& c);

  bool operator==(const VectorRef&) const = default;
};

inline VectorRef VectorRef::parse(const std::string& s, const Corpus& c) {
  int spk = -1, lng = -1, seg = -1;
  int n = std::sscanf(s.c_str(), "spk%d/long%d/seg%d", &spk, &lng, &seg);
  if (n < 2 || spk < 0 || spk >= c.config.num_speakers || lng < 0 ||
      lng >= c.config.longs_per_speaker)
    throw DataError("unparseable vector reference: " + s);
  int li = spk * c.config.longs_per_speaker + lng;
  if (n == 2) return {true, li};
  if (seg < 0 || seg >= c.config.segments_per_long)
    throw DataError("unparseable vector reference: " + s);
  return {false, li * c.config.segments_per_long + seg};
}

enum class TrialMode { kLongShort, kShortShort };

inline const char* trial_mode_name(TrialMode m) {
  return m == TrialMode::kLongShort ? "long-short" : "short-short";
}
inline TrialMode trial_mode_from_name(const std::string& s) {
  if (s == "long-short") return TrialMode::kLongShort;
  if (s == "short-short") return TrialMode::kShortShort;
  throw DataError("unknown trial mode: " + s);
}

struct Trial {
  VectorRef enroll;
  VectorRef test;
  bool is_target = false;
};

struct TrialList {
  TrialMode mode = TrialMode::kShortShort;
  std::vector<Trial> entries;

  void validate() const {
    bool has_target = false, has_nontarget = false;
    for (const Trial& t : entries) (t.is_target ? has_target : has_nontarget) = true;
    if (!has_target || !has_nontarget)
      throw DataError(
          "TrialList: needs at least one target and one nontarget");
  }
};

/// Samples a trial list from the held-out split. Targets pair material of
/// one speaker across two distinct held-out longs; nontargets pair two
/// speakers. Enrollment is a long vector in long-short mode and a short
/// vector in short-short mode; the test side is always a short vector.
inline TrialList make_trials(const Corpus& c, TrialMode mode, int num_target,
                             int num_nontarget, std::uint64_t seed) {
  if (c.config.num_speakers < 2)
    throw DataError("make_trials: need at least 2 speakers");
  if (num_target < 1 || num_nontarget < 1)
    throw DataError("make_trials: need at least one target and one nontarget");
  const int L = c.config.longs_per_speaker;
  const int G = c.config.segments_per_long;
  const int train_l = c.train_longs_per_speaker();
  const int eval_l = L - train_l;
  if (eval_l < 2)
    throw DataError("make_trials: need >= 2 held-out longs per speaker, have " +
                    std::to_string(eval_l) +
                    " (increase longs_per_speaker)");

  Rng rng(seed);
  auto eval_long = [&](int spk, int which) {
    return spk * L + train_l + which;
  };
  auto random_segment = [&](int li) { return li * G + rng.uniform_int(G); };

  TrialList trials;
  trials.mode = mode;
  trials.entries.reserve(num_target + num_nontarget);

  for (int i = 0; i < num_target; ++i) {
    int spk = rng.uniform_int(c.config.num_speakers);
    int a = rng.uniform_int(eval_l);
    int b = rng.uniform_int(eval_l - 1);
    if (b >= a) ++b;  // distinct held-out longs
    int la = eval_long(spk, a), lb = eval_long(spk, b);
    VectorRef enroll = mode == TrialMode::kLongShort
                           ? VectorRef{true, la}
                           : VectorRef{false, random_segment(la)};
    trials.entries.push_back({enroll, {false, random_segment(lb)}, true});
  }
  for (int i = 0; i < num_nontarget; ++i) {
    int s1 = rng.uniform_int(c.config.num_speakers);
    int s2 = rng.uniform_int(c.config.num_speakers - 1);
    if (s2 >= s1) ++s2;
    int la = eval_long(s1, rng.uniform_int(eval_l));
    int lb = eval_long(s2, rng.uniform_int(eval_l));
    VectorRef enroll = mode == TrialMode::kLongShort
                           ? VectorRef{true, la}
                           : VectorRef{false, random_segment(la)};
    trials.entries.push_back({enroll, {false, random_segment(lb)}, false});
  }
  trials.validate();
  return trials;
}

}  // namespace ivgan

#endif  // IVGAN_SYNTHCORPUS_HPP_
