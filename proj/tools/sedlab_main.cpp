// tools/sedlab_main.cpp

// Copyright 2026  The sedlab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line entry point: dataset generation, training, scoring, ablation
// sweeps, the class-wise comparison, and the built-in selftest. Outputs are
// files (CSV + JSON); nothing is interactive.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sedlab/experiment.hpp"
#include "sedlab/selftest.hpp"

namespace fs = std::filesystem;
using namespace sedlab;

namespace {

struct RunOptions {
  ExperimentConfig cfg;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string pooling = "attention";
  bool no_fpsl = false;
  std::string train_path;
  std::string eval_path;
  std::string out_dir;
};

// Flags shared by every training-backed subcommand.
void add_config_flags(CLI::App* cmd, RunOptions* opt) {
  cmd->add_option("--thresh", opt->cfg.thresh, "pseudo label confidence threshold");
  cmd->add_option("--win-size", opt->cfg.win_size, "pseudo label window extension (frames)");
  cmd->add_option("--alpha", opt->cfg.alpha, "weight of the pseudo strong loss");
  cmd->add_option("--pooling", opt->pooling,
                  "temporal pooling: max|mean|linear_softmax|attention");
  cmd->add_option("--median-size", opt->cfg.median_size, "median filter size (odd)");
  cmd->add_option("--binarize-thresh", opt->cfg.binarize_thresh,
                  "decode binarization threshold");
  cmd->add_option("--epochs", opt->cfg.epochs, "training epochs");
  cmd->add_option("--seeds", opt->seeds, "training seeds")->delimiter(',');
  cmd->add_flag("--no-fpsl", opt->no_fpsl, "disable the pseudo strong loss term");
  cmd->add_option("--train", opt->train_path, "training set JSONL")->required();
  cmd->add_option("--eval", opt->eval_path, "evaluation set JSONL")->required();
  cmd->add_option("--out", opt->out_dir, "output directory")->required();
}

void finalize_config(RunOptions* opt) {
  opt->cfg.pooling = pooling_from_string(opt->pooling);
  opt->cfg.use_fpsl = !opt->no_fpsl;
  if (const auto violations = validate_config(opt->cfg); !violations.empty())
    throw CLI::ValidationError("config", violations.front());
  if (opt->seeds.empty()) throw CLI::ValidationError("config", "need at least one seed");
}

void write_arm_artifacts(const std::string& out_dir, const std::vector<ArmOutcome>& arms,
                         const std::vector<std::uint64_t>& seeds,
                         const std::string& train_hash, const std::string& eval_hash) {
  fs::create_directories(out_dir);
  write_text_file(out_dir + "/metrics.csv", metrics_csv(arms));
  write_text_file(out_dir + "/per_seed.csv", per_seed_csv(arms));
  write_text_file(out_dir + "/manifest.json",
                  manifest_json(arms, seeds, train_hash, eval_hash).dump(2) + "\n");
}

int cmd_gen(const std::string& scene_path, const std::string& out_dir) {
  const ScenePair scenes = load_scene_json(scene_path);
  fs::create_directories(out_dir);
  const auto train_set = generate(scenes.train);
  const auto eval_set = generate(scenes.eval);
  const std::string train_path = out_dir + "/train.jsonl";
  const std::string eval_path = out_dir + "/eval.jsonl";
  save_dataset_jsonl(train_path, train_set);
  save_dataset_jsonl(eval_path, eval_set);
  std::cout << "wrote " << train_path << " (" << train_set.size()
            << " clips, hash " << file_content_hash(train_path) << ")\n";
  std::cout << "wrote " << eval_path << " (" << eval_set.size()
            << " clips, hash " << file_content_hash(eval_path) << ")\n";
  return 0;
}

int cmd_train(RunOptions* opt) {
  finalize_config(opt);
  const auto train_set = load_dataset_jsonl(opt->train_path);
  const auto eval_set = load_dataset_jsonl(opt->eval_path);
  const std::string name = opt->cfg.use_fpsl ? "fpsl" : "baseline";
  const ArmOutcome arm = run_arm(name, train_set, eval_set, opt->cfg, opt->seeds);
  write_arm_artifacts(opt->out_dir, {arm}, opt->seeds,
                      file_content_hash(opt->train_path),
                      file_content_hash(opt->eval_path));
  for (const SeedOutcome& s : arm.seeds) {
    const std::string tag = std::to_string(s.seed);
    save_checkpoint_json(opt->out_dir + "/checkpoint_seed" + tag + ".json", s.teacher,
                         config_hash(opt->cfg), s.seed, opt->cfg.epochs);
    std::vector<ClipPosteriors> preds;
    for (const ClipRecord& clip : eval_set)
      preds.push_back(ClipPosteriors{clip.clip_id, clip.frame_rate_hz,
                                     forward(s.teacher, clip.features).posteriors});
    save_posteriors_jsonl(opt->out_dir + "/posteriors_seed" + tag + ".jsonl", preds);
  }
  std::cout << metrics_csv({arm});
  return 0;
}

int cmd_sweep(RunOptions* opt, const std::string& param,
              const std::vector<double>& values) {
  finalize_config(opt);
  SweepSpec spec;
  spec.parameter = sweep_parameter_from_string(param);
  spec.values = values;
  spec.fixed = opt->cfg;
  const auto train_set = load_dataset_jsonl(opt->train_path);
  const auto eval_set = load_dataset_jsonl(opt->eval_path);
  const auto arms = run_sweep(spec, train_set, eval_set, opt->seeds);
  write_arm_artifacts(opt->out_dir, arms, opt->seeds,
                      file_content_hash(opt->train_path),
                      file_content_hash(opt->eval_path));
  std::cout << metrics_csv(arms);
  return 0;
}

int cmd_classwise(RunOptions* opt, const std::string& scene_path) {
  finalize_config(opt);
  const auto train_set = load_dataset_jsonl(opt->train_path);
  const auto eval_set = load_dataset_jsonl(opt->eval_path);
  ExperimentConfig baseline_cfg = opt->cfg;
  baseline_cfg.use_fpsl = false;
  ExperimentConfig fpsl_cfg = opt->cfg;
  fpsl_cfg.use_fpsl = true;
  const ArmOutcome baseline =
      run_arm("baseline", train_set, eval_set, baseline_cfg, opt->seeds);
  const ArmOutcome fpsl = run_arm("fpsl", train_set, eval_set, fpsl_cfg, opt->seeds);

  const int num_classes = static_cast<int>(eval_set.front().weak.values.size());
  std::vector<std::string> profiles;
  if (!scene_path.empty()) {
    const ScenePair scenes = load_scene_json(scene_path);
    for (const ClassProfile& p : scenes.train.profiles)
      profiles.push_back(to_string(p.stationarity));
  }
  while (static_cast<int>(profiles.size()) < num_classes)
    profiles.push_back("class" + std::to_string(profiles.size()));

  write_arm_artifacts(opt->out_dir, {baseline, fpsl}, opt->seeds,
                      file_content_hash(opt->train_path),
                      file_content_hash(opt->eval_path));
  const auto rows = classwise_report(baseline, fpsl, profiles);
  write_text_file(opt->out_dir + "/classwise.csv", classwise_csv(rows));
  std::cout << classwise_csv(rows);
  return 0;
}

int cmd_score(const std::string& refs_path, const std::string& hyps_path,
              const std::string& out_dir, const ExperimentConfig& cfg) {
  const auto refs = load_dataset_jsonl(refs_path);
  std::map<std::string, const ClipRecord*> by_id;
  for (const ClipRecord& r : refs) by_id[r.clip_id] = &r;

  // Posterior files carry a grid per clip and support the full operating
  // point grid; event files are already decoded, a single operating point.
  const std::string head = read_file(hyps_path).substr(0, 4096);
  const bool has_posteriors = head.find("\"posteriors\"") != std::string::npos;

  std::vector<EvalPair> report_pairs;
  std::map<double, std::vector<EvalPair>> per_op;
  double total_duration_s = 0.0;
  for (const ClipRecord& r : refs) total_duration_s += r.duration_s;
  const int class_count = static_cast<int>(refs.front().weak.values.size());

  if (has_posteriors) {
    const auto preds = load_posteriors_jsonl(hyps_path);
    if (preds.size() != refs.size())
      throw std::runtime_error("score: hypothesis count does not match references");
    auto pairs_at = [&](double op) {
      std::vector<EvalPair> pairs;
      for (const ClipPosteriors& p : preds) {
        const auto it = by_id.find(p.clip_id);
        if (it == by_id.end())
          throw std::runtime_error("score: unknown clip " + p.clip_id);
        DecodeParams dp;
        dp.binarize_thresh = op;
        dp.median_size = cfg.median_size;
        dp.frame_rate_hz = p.frame_rate_hz;
        pairs.push_back(EvalPair{p.clip_id, it->second->duration_s, it->second->events,
                                 decode(p.posteriors, dp)});
      }
      return pairs;
    };
    report_pairs = pairs_at(cfg.binarize_thresh);
    for (double op : psds_operating_points(cfg.psds_num_operating_points))
      per_op.emplace(op, pairs_at(op));
  } else {
    const auto preds = load_events_jsonl(hyps_path);
    if (preds.size() != refs.size())
      throw std::runtime_error("score: hypothesis count does not match references");
    for (const ClipEvents& p : preds) {
      const auto it = by_id.find(p.clip_id);
      if (it == by_id.end()) throw std::runtime_error("score: unknown clip " + p.clip_id);
      report_pairs.push_back(
          EvalPair{p.clip_id, it->second->duration_s, it->second->events, p.events});
    }
    per_op.emplace(cfg.binarize_thresh, report_pairs);
  }

  MetricsRow row;
  const F1Report ef1 =
      event_f1(report_pairs, cfg.onset_collar_s, cfg.offset_collar_s, cfg.offset_collar_frac);
  row.ef1_macro = ef1.macro_f1;
  row.ef1_micro = ef1.micro_f1;
  row.ibf1 = intersection_f1(report_pairs, cfg.ib_dtc, cfg.ib_gtc).macro_f1;
  std::vector<std::string> warnings;
  PsdsParams p1 = psds1_params_from(cfg);
  PsdsParams p2 = psds2_params_from(cfg);
  if (!has_posteriors) {
    p1.operating_points = {cfg.binarize_thresh};
    p2.operating_points = {cfg.binarize_thresh};
  }
  row.psds1 = psds(per_op, p1, total_duration_s, class_count, &warnings);
  row.psds2 = psds(per_op, p2, total_duration_s, class_count, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  std::string csv = "PSDS1,PSDS2,EF1_mac,EF1_mic,IBF1\n";
  csv += format_metric(row.psds1) + "," + format_metric(row.psds2) + "," +
         format_metric(row.ef1_macro) + "," + format_metric(row.ef1_micro) + "," +
         format_metric(row.ibf1) + "\n";
  fs::create_directories(out_dir);
  write_text_file(out_dir + "/score.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_selftest() {
  const SelfTestResult result = run_selftests();
  for (const std::string& f : result.failures) std::cout << "FAIL  " << f << "\n";
  std::cout << (result.total - result.failed) << "/" << result.total
            << " selftest groups passed\n";
  return result.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sedlab: a weakly supervised sound event detection laboratory"};
  app.require_subcommand(1);

  std::string scene_path;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  gen->add_option("--scene", scene_path, "scene config JSON")->required();
  gen->add_option("--out", gen_out, "output directory")->required();

  RunOptions train_opt;
  CLI::App* train_cmd = app.add_subcommand("train", "train and evaluate one arm");
  add_config_flags(train_cmd, &train_opt);

  RunOptions sweep_opt;
  std::string sweep_param;
  std::vector<double> sweep_values;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "ablation sweep over one parameter");
  add_config_flags(sweep_cmd, &sweep_opt);
  sweep_cmd->add_option("--param", sweep_param, "thresh|win_size|alpha")->required();
  sweep_cmd->add_option("--values", sweep_values, "swept values")
      ->required()
      ->delimiter(',');

  RunOptions cls_opt;
  std::string cls_scene;
  CLI::App* cls_cmd =
      app.add_subcommand("classwise", "per-class F1 comparison of baseline vs FPSL");
  add_config_flags(cls_cmd, &cls_opt);
  cls_cmd->add_option("--scene", cls_scene, "scene JSON for class profile labels");

  std::string refs_path, hyps_path, score_out;
  RunOptions score_opt;
  CLI::App* score_cmd = app.add_subcommand("score", "score predictions against references");
  score_cmd->add_option("--refs", refs_path, "reference dataset JSONL")->required();
  score_cmd->add_option("--hyps", hyps_path, "posteriors or events JSONL")->required();
  score_cmd->add_option("--out", score_out, "output directory")->required();
  score_cmd->add_option("--median-size", score_opt.cfg.median_size,
                        "median filter size (odd)");
  score_cmd->add_option("--binarize-thresh", score_opt.cfg.binarize_thresh,
                        "decode binarization threshold");

  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "run the built-in verification suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(scene_path, gen_out);
    if (train_cmd->parsed()) return cmd_train(&train_opt);
    if (sweep_cmd->parsed()) return cmd_sweep(&sweep_opt, sweep_param, sweep_values);
    if (cls_cmd->parsed()) return cmd_classwise(&cls_opt, cls_scene);
    if (score_cmd->parsed()) return cmd_score(refs_path, hyps_path, score_out, score_opt.cfg);
    if (selftest_cmd->parsed()) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
