// tests/test_io.cpp

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
#include <filesystem>
#include <fstream>

#include "ivgan/io.hpp"
#include "ivgan/rng.hpp"

using namespace ivgan;

namespace {

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() /
          ("ivgan_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void corrupt_byte(const std::string& path, std::size_t offset, char value) {
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(offset);
  f.put(value);
}

}  // namespace

TEST_CASE("mlp container round trip preserves forward outputs") {
  TempDir tmp;
  Mlp net = init_mlp({7, 12, 5},
                     {Activation::kLeakyRelu, Activation::kTanh}, 3);
  std::string path = tmp.path("net.bin");
  save_mlp(path, net, "generator", {{"dim", 5}}, 3);

  nlohmann::json header;
  Mlp loaded = load_mlp(path, "generator", &header);
  REQUIRE(header["extra"]["dim"] == 5);

  Rng rng(4);
  Mat x = rng.gaussian_mat(6, 7);
  Mat y0 = forward_output(net, x);
  Mat y1 = forward_output(loaded, x);
  REQUIRE((y0 - y1).cwiseAbs().maxCoeff() < 1e-5);

  // Parameters within one f32 rounding step.
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    Mat diff = net.layers[k].w - loaded.layers[k].w;
    REQUIRE(diff.cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("mlp container rejects corruption") {
  TempDir tmp;
  Mlp net = init_mlp({4, 3}, {Activation::kLinear}, 5);
  std::string path = tmp.path("net.bin");

  SECTION("bad magic") {
    save_mlp(path, net, "generator");
    corrupt_byte(path, 2, 'X');
    REQUIRE_THROWS_WITH(load_mlp(path, "generator"),
                        Catch::Contains("bad magic"));
  }

  SECTION("role mismatch") {
    save_mlp(path, net, "critic");
    REQUIRE_THROWS_WITH(load_mlp(path, "generator"),
                        Catch::Contains("role mismatch"));
  }

  SECTION("kind mismatch") {
    Rng rng(6);
    PldaModel m;
    m.mean = rng.gaussian_vec(3);
    m.speaker_subspace = rng.gaussian_mat(3, 1);
    m.residual_cov = Mat::Identity(3, 3);
    save_plda(path, m);
    REQUIRE_THROWS_WITH(load_mlp(path, "generator"),
                        Catch::Contains("kind mismatch"));
  }

  SECTION("truncated payload names the expected count") {
    save_mlp(path, net, "generator");
    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 8);
    REQUIRE_THROWS_WITH(load_mlp(path, "generator"),
                        Catch::Contains("truncated"));
  }

  SECTION("oversized payload is rejected") {
    save_mlp(path, net, "generator");
    std::ofstream f(path, std::ios::app | std::ios::binary);
    float junk = 0.0f;
    f.write(reinterpret_cast<const char*>(&junk), sizeof(junk));
    f.close();
    REQUIRE_THROWS_WITH(load_mlp(path, "generator"),
                        Catch::Contains("declared parameters"));
  }
}

TEST_CASE("corpus container round trip is exact") {
  TempDir tmp;
  CorpusConfig cc;
  cc.dim = 12;
  cc.latent_dim = 3;
  cc.num_speakers = 6;
  cc.longs_per_speaker = 2;
  cc.segments_per_long = 2;
  cc.bias_rank = 2;
  cc.seed = 77;
  Corpus corpus = generate_corpus(cc);
  std::string path = tmp.path("corpus.bin");
  save_corpus(path, corpus);
  Corpus loaded = load_corpus(path);
  REQUIRE(loaded.longs == corpus.longs);  // f64 payload, bit-exact
  REQUIRE(loaded.shorts == corpus.shorts);
  REQUIRE(loaded.config.seed == cc.seed);
  REQUIRE(loaded.config.short_noise_scale == cc.short_noise_scale);
}

TEST_CASE("plda container round trip scores consistently") {
  TempDir tmp;
  Rng rng(8);
  PldaModel m;
  m.mean = rng.gaussian_vec(6);
  m.speaker_subspace = rng.gaussian_mat(6, 2);
  Mat a = 0.2 * rng.gaussian_mat(6, 6);
  m.residual_cov = a * a.transpose() + Mat::Identity(6, 6);
  std::string path = tmp.path("plda.bin");
  save_plda(path, m);
  PldaModel loaded = load_plda(path);
  PldaScorer s0(m), s1(loaded);
  for (int t = 0; t < 20; ++t) {
    Vec x = m.mean + rng.gaussian_vec(6);
    Vec y = m.mean + rng.gaussian_vec(6);
    REQUIRE(s0.llr(x, y) == Approx(s1.llr(x, y)).margin(1e-3));
  }
}

TEST_CASE("scores csv round trips exactly") {
  TempDir tmp;
  Rng rng(9);
  ScoredTrialSet s;
  s.condition = "short-short/baseline";
  for (int i = 0; i < 50; ++i)
    s.entries.push_back({"spk1/long2", "spk3/long0/seg1", i % 3 == 0,
                         rng.gaussian() * 1e3});
  std::string path = tmp.path("scores.csv");
  write_scores_csv(path, s);
  ScoredTrialSet r = read_scores_csv(path);
  REQUIRE(r.condition == s.condition);
  REQUIRE(r.entries.size() == s.entries.size());
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    REQUIRE(r.entries[i].score == s.entries[i].score);  // %.17g exact
    REQUIRE(r.entries[i].is_target == s.entries[i].is_target);
    REQUIRE(r.entries[i].enroll_ref == s.entries[i].enroll_ref);
  }
}

TEST_CASE("trials csv round trips") {
  TempDir tmp;
  CorpusConfig cc;
  cc.dim = 10;
  cc.latent_dim = 2;
  cc.num_speakers = 8;
  cc.longs_per_speaker = 4;
  cc.segments_per_long = 2;
  cc.bias_rank = 1;
  cc.seed = 10;
  Corpus corpus = generate_corpus(cc);
  TrialList trials = make_trials(corpus, TrialMode::kLongShort, 25, 25, 1);
  std::string path = tmp.path("trials.csv");
  write_trials_csv(path, trials, corpus);
  TrialList r = read_trials_csv(path, corpus);
  REQUIRE(r.mode == trials.mode);
  REQUIRE(r.entries.size() == trials.entries.size());
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    REQUIRE(r.entries[i].enroll == trials.entries[i].enroll);
    REQUIRE(r.entries[i].test == trials.entries[i].test);
    REQUIRE(r.entries[i].is_target == trials.entries[i].is_target);
  }
}

TEST_CASE("det and history csv round trips") {
  TempDir tmp;
  ScoredTrialSet s;
  Rng rng(11);
  for (int i = 0; i < 30; ++i)
    s.entries.push_back({"", "", i % 2 == 0, rng.gaussian()});
  auto pts = det_points(s);
  std::string path = tmp.path("det.csv");
  write_det_csv(path, pts);
  auto r = read_det_csv(path);
  REQUIRE(r.size() == pts.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    // +inf round-trips through "inf".
    REQUIRE(r[i].threshold == pts[i].threshold);
    REQUIRE(r[i].p_fa == pts[i].p_fa);
    REQUIRE(r[i].p_miss == pts[i].p_miss);
  }

  TrainHistory h;
  h.epochs.push_back({0.1, -0.2, 0.3, 1.4, 2.5, 0.33});
  h.epochs.push_back({0.05, -0.1, 0.2, 1.1, 2.0, 0.25});
  std::string hpath = tmp.path("history.csv");
  write_history_csv(hpath, h);
  TrainHistory hr = read_history_csv(hpath);
  REQUIRE(hr.epochs.size() == 2);
  REQUIRE(hr.epochs[1].cosine_loss == 0.2);
  REQUIRE(hr.epochs[0].heldout_mean_cos == 0.33);
}

TEST_CASE("report and vectors csv round trips") {
  TempDir tmp;
  std::vector<ReportRow> rows = {
      {"short-short", "a) Baseline", 0.11, 0.5, ""},
      {"short-short", "e) a + d", 0.09, 0.45, "untrained"}};
  std::string path = tmp.path("report.csv");
  write_report_csv(path, rows);
  auto r = read_report_csv(path);
  REQUIRE(r.size() == 2);
  REQUIRE(r[0].system == "a) Baseline");
  REQUIRE(r[1].eer == 0.09);
  REQUIRE(r[1].note == "untrained");

  NamedVectors v;
  Rng rng(12);
  v.refs = {"a", "b", "c"};
  v.rows = rng.gaussian_mat(3, 5);
  std::string vpath = tmp.path("vectors.csv");
  write_vectors_csv(vpath, v);
  NamedVectors vr = read_vectors_csv(vpath);
  REQUIRE(vr.refs == v.refs);
  REQUIRE(vr.rows == v.rows);
}
