// tools/ivgan.cpp

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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ivgan/experiment.hpp"
#include "ivgan/gradcheck.hpp"
#include "ivgan/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

using namespace ivgan;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
};

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig cfg = opts.config_path.empty()
                             ? default_desk_config()
                             : load_experiment_config(opts.config_path);
  apply_env_seed(cfg);
  if (opts.seed) cfg.seed = *opts.seed;  // flags override file and env
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.deterministic) cfg.deterministic = true;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config JSON");
  cmd->add_option("--out-dir", opts.out_dir, "artifact directory");
  cmd->add_option("--seed", opts.seed, "override the global seed");
  cmd->add_flag("--deterministic", opts.deterministic,
                "single-threaded reference mode");
}

int cmd_synth(const CommonOpts& opts) {
  ExperimentConfig cfg = resolve_config(opts);
  ExperimentRunner runner(cfg, &std::cerr);
  Corpus corpus = runner.ensure_corpus();
  for (TrialMode mode : runner.config().eval.conditions)
    runner.ensure_trials(corpus, mode);
  std::cout << "corpus: " << runner.path("corpus.bin") << " ("
            << corpus.num_longs() << " longs, " << corpus.num_shorts()
            << " shorts)\n";
  return kExitOk;
}

int cmd_train_gan(const CommonOpts& opts, const std::string& corpus_path,
                  const std::string& tag) {
  ExperimentConfig cfg = resolve_config(opts);
  if (tag != "dwcgan" && tag != "singleg")
    throw ConfigError("--system must be dwcgan or singleg");
  ExperimentRunner runner(cfg, &std::cerr);
  Corpus corpus = corpus_path.empty() ? runner.ensure_corpus()
                                      : load_corpus(corpus_path);
  runner.ensure_generator(corpus, tag);
  std::cout << "generator: " << runner.path("g_" + tag + ".bin") << "\n";
  return kExitOk;
}

int cmd_train_plda(const CommonOpts& opts) {
  ExperimentConfig cfg = resolve_config(opts);
  ExperimentRunner runner(cfg, &std::cerr);
  Corpus corpus = runner.ensure_corpus();
  runner.ensure_plda(corpus);
  std::cout << "plda: " << runner.path("plda.bin") << "\n";
  return kExitOk;
}

int cmd_transform(const std::string& g_path, const std::string& vectors_path,
                  const std::string& out_path, const std::string& policy_name,
                  int num_samples, double sigma, std::uint64_t seed) {
  Mlp g = load_mlp(g_path, "generator");
  TransformPolicy policy;
  if (policy_name == "zero") {
    policy.kind = TransformPolicy::Kind::kZeroNoise;
  } else if (policy_name == "average") {
    policy.kind = TransformPolicy::Kind::kAverage;
    policy.num_samples = num_samples;
    policy.noise_sigma = sigma;
    policy.seed = seed;
  } else {
    throw ConfigError("--policy must be zero or average");
  }
  NamedVectors in = read_vectors_csv(vectors_path);
  NamedVectors out;
  out.refs = in.refs;
  out.rows = transform_batch(g, in.rows, policy);
  write_vectors_csv(out_path, out);
  std::cout << "transformed " << in.refs.size() << " vectors -> " << out_path
            << "\n";
  return kExitOk;
}

int cmd_score(const std::string& plda_path, const std::string& corpus_path,
              const std::string& trials_path, const std::string& g_path,
              const std::string& mode_name, const std::string& out_path,
              const DcfParams& dcf) {
  Corpus corpus = load_corpus(corpus_path);
  PldaModel plda = load_plda(plda_path);
  TrialList trials = read_trials_csv(trials_path, corpus);
  EvalMode mode = eval_mode_from_name(mode_name);
  std::optional<Mlp> g;
  if (!g_path.empty()) g = load_mlp(g_path, "generator");
  ConditionResult result = evaluate_condition(
      corpus, trials, plda, g ? &*g : nullptr, mode, dcf);
  write_scores_csv(out_path, result.scores);
  std::printf("%s: eer=%.4f min_dcf=%.4f (%zu trials)\n",
              result.scores.condition.c_str(), result.eer, result.min_dcf,
              result.scores.entries.size());
  return kExitOk;
}

int cmd_eval(const std::string& scores_path, const std::string& det_path,
             const DcfParams& dcf) {
  ScoredTrialSet scores = read_scores_csv(scores_path);
  scores.validate();
  double eer = compute_eer(scores);
  double dcf_val = compute_min_dcf(scores, dcf);
  std::printf("eer=%.6f\n", eer);
  std::printf("min_dcf=%.6f (c_miss=%g c_fa=%g p_target=%g)\n", dcf_val,
              dcf.c_miss, dcf.c_fa, dcf.p_target);
  if (!det_path.empty()) {
    write_det_csv(det_path, det_points(scores));
    std::printf("det: %s\n", det_path.c_str());
  }
  return kExitOk;
}

int cmd_fuse(const std::string& a_path, const std::string& b_path,
             double w_a, double w_b, bool raw, const std::string& out_path) {
  ScoredTrialSet a = read_scores_csv(a_path);
  ScoredTrialSet b = read_scores_csv(b_path);
  ScoredTrialSet fused = fuse_scores(a, b, w_a, w_b, !raw);
  write_scores_csv(out_path, fused);
  std::printf("fused %zu trials -> %s\n", fused.entries.size(),
              out_path.c_str());
  return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed) {
  bool ok = true;
  for (const GradCheckResult& r : run_gradient_suite(seed)) {
    std::printf("%-26s max_rel_err=%.3e tol=%.0e %s\n", r.name.c_str(),
                r.max_rel_error, r.tolerance, r.pass ? "ok" : "FAIL");
    ok &= r.pass;
  }
  return ok ? kExitOk : kExitDivergence;
}

int cmd_experiment(const CommonOpts& opts) {
  ExperimentConfig cfg = resolve_config(opts);
  std::vector<ReportRow> rows = run_experiment(cfg, &std::cerr);
  std::printf("%-12s %-12s %8s %8s %s\n", "condition", "system", "eer",
              "min_dcf", "note");
  for (const ReportRow& r : rows)
    std::printf("%-12s %-12s %8.4f %8.4f %s\n", r.condition.c_str(),
                r.system.c_str(), r.eer, r.min_dcf, r.note.c_str());
  std::cout << "report: "
            << (std::filesystem::path(cfg.out_dir) / "report.csv").string()
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Short-utterance i-vector compensation: synthetic corpus, conditional "
      "WGAN training, PLDA scoring, EER/minDCF evaluation"};
  app.require_subcommand(1);

  CommonOpts synth_opts, gan_opts, plda_opts, exp_opts;
  std::string gan_corpus, gan_tag = "dwcgan";

  CLI::App* synth = app.add_subcommand("synth", "generate corpus and trials");
  add_common(synth, synth_opts);

  CLI::App* tgan = app.add_subcommand(
      "train-gan", "train generator/head/critic, write models + history");
  add_common(tgan, gan_opts);
  tgan->add_option("--corpus", gan_corpus, "corpus file (default in out-dir)");
  tgan->add_option("--system", gan_tag, "dwcgan (default) or singleg");

  CLI::App* tplda = app.add_subcommand("train-plda", "train the PLDA back-end");
  add_common(tplda, plda_opts);

  std::string tr_g, tr_in, tr_out, tr_policy = "zero";
  int tr_samples = 8;
  double tr_sigma = 0.5;
  std::uint64_t tr_seed = 0;
  CLI::App* transform =
      app.add_subcommand("transform", "apply the generator to a vectors CSV");
  transform->add_option("--g", tr_g, "generator model file")->required();
  transform->add_option("--vectors", tr_in, "input vectors CSV")->required();
  transform->add_option("--out", tr_out, "output vectors CSV")->required();
  transform->add_option("--policy", tr_policy, "zero (default) or average");
  transform->add_option("--samples", tr_samples, "noise draws when averaging");
  transform->add_option("--sigma", tr_sigma, "noise sigma when averaging");
  transform->add_option("--noise-seed", tr_seed, "noise seed when averaging");

  std::string sc_plda, sc_corpus, sc_trials, sc_g, sc_mode = "baseline",
                                                   sc_out;
  DcfParams sc_dcf;
  CLI::App* score =
      app.add_subcommand("score", "score a trial list with PLDA");
  score->add_option("--plda", sc_plda, "PLDA model file")->required();
  score->add_option("--corpus", sc_corpus, "corpus file")->required();
  score->add_option("--trials", sc_trials, "trials CSV")->required();
  score->add_option("--g", sc_g, "generator file (transforming modes)");
  score->add_option("--mode", sc_mode, "baseline | long-short | short-short");
  score->add_option("--out", sc_out, "output scores CSV")->required();
  score->add_option("--c-miss", sc_dcf.c_miss, "miss cost");
  score->add_option("--c-fa", sc_dcf.c_fa, "false-alarm cost");
  score->add_option("--p-target", sc_dcf.p_target, "target prior");

  std::string ev_scores, ev_det;
  DcfParams ev_dcf;
  CLI::App* evalc = app.add_subcommand("eval", "EER/minDCF from a scores CSV");
  evalc->add_option("--scores", ev_scores, "scores CSV")->required();
  evalc->add_option("--det-out", ev_det, "write DET points CSV");
  evalc->add_option("--c-miss", ev_dcf.c_miss, "miss cost");
  evalc->add_option("--c-fa", ev_dcf.c_fa, "false-alarm cost");
  evalc->add_option("--p-target", ev_dcf.p_target, "target prior");

  std::string fu_a, fu_b, fu_out;
  double fu_wa = 7.0, fu_wb = 3.0;
  bool fu_raw = false;
  CLI::App* fuse = app.add_subcommand("fuse", "weighted fusion of two score CSVs");
  fuse->add_option("--base", fu_a, "base scores CSV")->required();
  fuse->add_option("--other", fu_b, "other scores CSV")->required();
  fuse->add_option("--w-base", fu_wa, "base weight (default 7)");
  fuse->add_option("--w-other", fu_wb, "other weight (default 3)");
  fuse->add_flag("--raw", fu_raw, "skip per-system score normalization");
  fuse->add_option("--out", fu_out, "output CSV")->required();

  std::uint64_t gc_seed = 7;
  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gradcheck->add_option("--seed", gc_seed, "suite seed");

  CLI::App* experiment = app.add_subcommand(
      "experiment",
      "full pipeline: synth, PLDA, baseline, GANs, scoring, fusion, report");
  add_common(experiment, exp_opts);

  try {
    app.parse(argc, argv);
    if (synth->parsed()) return cmd_synth(synth_opts);
    if (tgan->parsed()) return cmd_train_gan(gan_opts, gan_corpus, gan_tag);
    if (tplda->parsed()) return cmd_train_plda(plda_opts);
    if (transform->parsed())
      return cmd_transform(tr_g, tr_in, tr_out, tr_policy, tr_samples,
                           tr_sigma, tr_seed);
    if (score->parsed())
      return cmd_score(sc_plda, sc_corpus, sc_trials, sc_g, sc_mode, sc_out,
                       sc_dcf);
    if (evalc->parsed()) return cmd_eval(ev_scores, ev_det, ev_dcf);
    if (fuse->parsed())
      return cmd_fuse(fu_a, fu_b, fu_wa, fu_wb, fu_raw, fu_out);
    if (gradcheck->parsed()) return cmd_gradcheck(gc_seed);
    if (experiment->parsed()) return cmd_experiment(exp_opts);
    return kExitOther;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "numeric divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}
