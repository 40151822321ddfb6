// sedlab/experiment.hpp

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

// Experiment arms: train over a seed list, evaluate the teacher, aggregate
// seed means, and emit the CSV/manifest artifacts. Sweeps reproduce the
// baseline-plus-values table layout of the ablations.

#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sedlab/core.hpp"
#include "sedlab/decode.hpp"
#include "sedlab/io.hpp"
#include "sedlab/metrics.hpp"
#include "sedlab/nnet.hpp"

namespace sedlab {

// The five reported table columns.
struct MetricsRow {
  double psds1 = 0.0;
  double psds2 = 0.0;
  double ef1_macro = 0.0;
  double ef1_micro = 0.0;
  double ibf1 = 0.0;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  MetricsRow metrics;
  F1Report event_report;  // per-class event F1 at the default operating point
  std::vector<TrainLogEntry> log;
  ModelParams teacher;  // the evaluated model, kept for checkpoints
};

struct ArmOutcome {
  std::string arm;
  ExperimentConfig config;
  std::vector<SeedOutcome> seeds;
  MetricsRow mean;
};

inline PsdsParams psds1_params_from(const ExperimentConfig& cfg) {
  PsdsParams p;
  p.dtc_threshold = cfg.psds1_dtc;
  p.gtc_threshold = cfg.psds1_gtc;
  p.cttc_threshold = cfg.psds1_cttc;
  p.alpha_ct = cfg.psds1_alpha_ct;
  p.alpha_st = cfg.psds1_alpha_st;
  p.e_max = cfg.psds_e_max;
  p.operating_points = psds_operating_points(cfg.psds_num_operating_points);
  return p;
}

inline PsdsParams psds2_params_from(const ExperimentConfig& cfg) {
  PsdsParams p;
  p.dtc_threshold = cfg.psds2_dtc;
  p.gtc_threshold = cfg.psds2_gtc;
  p.cttc_threshold = cfg.psds2_cttc;
  p.alpha_ct = cfg.psds2_alpha_ct;
  p.alpha_st = cfg.psds2_alpha_st;
  p.e_max = cfg.psds_e_max;
  p.operating_points = psds_operating_points(cfg.psds_num_operating_points);
  return p;
}

// Scores one trained model on the eval split: one forward pass per clip, one
// decode at the reporting operating point for the F1 metrics, and one decode
// per PSDS operating point for the two ROC scores.
inline MetricsRow evaluate_model(const ModelParams& model,
                                 const std::vector<ClipRecord>& eval_set,
                                 const ExperimentConfig& cfg,
                                 F1Report* event_report = nullptr,
                                 std::vector<std::string>* warnings = nullptr) {
  if (eval_set.empty()) throw std::invalid_argument("evaluate_model: empty eval set");
  std::vector<FrameGrid> posteriors;
  posteriors.reserve(eval_set.size());
  double total_duration_s = 0.0;
  for (const ClipRecord& clip : eval_set) {
    posteriors.push_back(forward(model, clip.features).posteriors);
    total_duration_s += clip.duration_s;
  }

  auto pairs_at = [&](double binarize_thresh) {
    std::vector<EvalPair> pairs;
    pairs.reserve(eval_set.size());
    for (std::size_t i = 0; i < eval_set.size(); ++i) {
      const ClipRecord& clip = eval_set[i];
      DecodeParams dp;
      dp.binarize_thresh = binarize_thresh;
      dp.median_size = cfg.median_size;
      dp.frame_rate_hz = clip.frame_rate_hz;
      pairs.push_back(EvalPair{clip.clip_id, clip.duration_s, clip.events,
                               decode(posteriors[i], dp)});
    }
    return pairs;
  };

  MetricsRow row;
  const auto report_pairs = pairs_at(cfg.binarize_thresh);
  const F1Report ef1 = event_f1(report_pairs, cfg.onset_collar_s, cfg.offset_collar_s,
                                cfg.offset_collar_frac);
  row.ef1_macro = ef1.macro_f1;
  row.ef1_micro = ef1.micro_f1;
  row.ibf1 = intersection_f1(report_pairs, cfg.ib_dtc, cfg.ib_gtc).macro_f1;
  if (event_report != nullptr) *event_report = ef1;

  std::map<double, std::vector<EvalPair>> per_op;
  for (double op : psds_operating_points(cfg.psds_num_operating_points))
    per_op.emplace(op, pairs_at(op));
  const int class_count = static_cast<int>(eval_set.front().weak.values.size());
  row.psds1 = psds(per_op, psds1_params_from(cfg), total_duration_s, class_count, warnings);
  row.psds2 = psds(per_op, psds2_params_from(cfg), total_duration_s, class_count, warnings);
  return row;
}

// Trains one arm across the seed list and reports per-seed and seed-mean
// metrics. Evaluation always scores the EMA teacher.
inline ArmOutcome run_arm(const std::string& arm_name,
                          const std::vector<ClipRecord>& train_set,
                          const std::vector<ClipRecord>& eval_set,
                          const ExperimentConfig& cfg,
                          const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("run_arm: need at least one seed");
  ArmOutcome arm;
  arm.arm = arm_name;
  arm.config = cfg;
  for (std::uint64_t seed : seeds) {
    TrainResult tr = train(train_set, cfg, seed);
    SeedOutcome outcome;
    outcome.seed = seed;
    outcome.log = tr.log;
    outcome.teacher = std::move(tr.teacher.params);
    outcome.metrics =
        evaluate_model(outcome.teacher, eval_set, cfg, &outcome.event_report);
    arm.seeds.push_back(std::move(outcome));
  }
  const double inv = 1.0 / static_cast<double>(arm.seeds.size());
  for (const SeedOutcome& s : arm.seeds) {
    arm.mean.psds1 += inv * s.metrics.psds1;
    arm.mean.psds2 += inv * s.metrics.psds2;
    arm.mean.ef1_macro += inv * s.metrics.ef1_macro;
    arm.mean.ef1_micro += inv * s.metrics.ef1_micro;
    arm.mean.ibf1 += inv * s.metrics.ibf1;
  }
  return arm;
}

// --- Sweeps -----------------------------------------------------------------

enum class SweepParameter { thresh, win_size, alpha };

inline std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::thresh: return "thresh";
    case SweepParameter::win_size: return "win_size";
    case SweepParameter::alpha: return "alpha";
  }
  return "thresh";
}

inline SweepParameter sweep_parameter_from_string(const std::string& s) {
  if (s == "thresh") return SweepParameter::thresh;
  if (s == "win_size" || s == "win-size") return SweepParameter::win_size;
  if (s == "alpha") return SweepParameter::alpha;
  throw std::invalid_argument("unknown sweep parameter: " + s);
}

struct SweepSpec {
  SweepParameter parameter = SweepParameter::win_size;
  std::vector<double> values;
  ExperimentConfig fixed;
};

inline std::vector<std::string> validate_sweep(const SweepSpec& spec) {
  std::vector<std::string> v;
  if (spec.values.empty()) v.push_back("sweep values must be non-empty");
  for (double x : spec.values) {
    switch (spec.parameter) {
      case SweepParameter::thresh:
        if (!probability_like(x)) v.push_back("thresh value outside (0, 1)");
        break;
      case SweepParameter::win_size:
        if (x < 0.0 || x != static_cast<double>(static_cast<int>(x)))
          v.push_back("win_size value must be a non-negative integer");
        break;
      case SweepParameter::alpha:
        if (x < 0.0) v.push_back("alpha value must be >= 0");
        break;
    }
  }
  if (const auto cfg_violations = validate_config(spec.fixed); !cfg_violations.empty())
    v.insert(v.end(), cfg_violations.begin(), cfg_violations.end());
  return v;
}

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace detail

// Table layout of the ablations: a no-FPSL baseline row first, then one FPSL
// row per swept value with everything else held at `fixed`.
inline std::vector<ArmOutcome> run_sweep(const SweepSpec& spec,
                                         const std::vector<ClipRecord>& train_set,
                                         const std::vector<ClipRecord>& eval_set,
                                         const std::vector<std::uint64_t>& seeds) {
  if (const auto violations = validate_sweep(spec); !violations.empty())
    throw std::invalid_argument("run_sweep: " + violations.front());
  std::vector<ArmOutcome> rows;
  ExperimentConfig baseline = spec.fixed;
  baseline.use_fpsl = false;
  rows.push_back(run_arm("baseline", train_set, eval_set, baseline, seeds));
  for (double value : spec.values) {
    ExperimentConfig cfg = spec.fixed;
    cfg.use_fpsl = true;
    std::string label;
    switch (spec.parameter) {
      case SweepParameter::thresh:
        cfg.thresh = value;
        label = "thresh=" + detail::format_number(value);
        break;
      case SweepParameter::win_size:
        cfg.win_size = static_cast<int>(value);
        label = "win_size=" + detail::format_number(value);
        break;
      case SweepParameter::alpha:
        cfg.alpha = value;
        label = "alpha=" + detail::format_number(value);
        break;
    }
    rows.push_back(run_arm(label, train_set, eval_set, cfg, seeds));
  }
  return rows;
}

// --- Class-wise comparison ---------------------------------------------------

struct ClasswiseRow {
  int class_id = 0;
  std::string profile;
  double baseline_f1 = 0.0;
  double fpsl_f1 = 0.0;
  double delta = 0.0;
};

namespace detail {

inline double seed_mean_class_f1(const ArmOutcome& arm, int class_id) {
  double sum = 0.0;
  for (const SeedOutcome& s : arm.seeds) {
    const auto& f1 = s.event_report.f1;
    if (class_id < static_cast<int>(f1.size())) sum += f1[static_cast<std::size_t>(class_id)];
  }
  return sum / static_cast<double>(arm.seeds.size());
}

}  // namespace detail

// Per-class event F1 of the two arms (seed means) and their difference.
// `profiles` labels each class, e.g. "transient" / "stationary".
inline std::vector<ClasswiseRow> classwise_report(const ArmOutcome& baseline,
                                                  const ArmOutcome& fpsl,
                                                  const std::vector<std::string>& profiles) {
  std::vector<ClasswiseRow> rows;
  for (int c = 0; c < static_cast<int>(profiles.size()); ++c) {
    ClasswiseRow row;
    row.class_id = c;
    row.profile = profiles[static_cast<std::size_t>(c)];
    row.baseline_f1 = detail::seed_mean_class_f1(baseline, c);
    row.fpsl_f1 = detail::seed_mean_class_f1(fpsl, c);
    row.delta = row.fpsl_f1 - row.baseline_f1;
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- Report emission ---------------------------------------------------------

inline std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i > 0) out += "|";
    out += std::to_string(seeds[i]);
  }
  return out;
}

inline constexpr const char* kMetricsCsvHeader =
    "arm,thresh,win_size,alpha,use_fpsl,pooling,median_size,binarize_thresh,epochs,"
    "batch_size,learning_rate,ema_momentum,seeds,PSDS1,PSDS2,EF1_mac,EF1_mic,IBF1";

inline std::string metrics_csv_row(const ArmOutcome& arm) {
  std::vector<std::uint64_t> seeds;
  for (const SeedOutcome& s : arm.seeds) seeds.push_back(s.seed);
  const ExperimentConfig& c = arm.config;
  std::string out = arm.arm;
  out += "," + detail::format_number(c.thresh);
  out += "," + std::to_string(c.win_size);
  out += "," + detail::format_number(c.alpha);
  out += c.use_fpsl ? ",1" : ",0";
  out += "," + to_string(c.pooling);
  out += "," + std::to_string(c.median_size);
  out += "," + detail::format_number(c.binarize_thresh);
  out += "," + std::to_string(c.epochs);
  out += "," + std::to_string(c.batch_size);
  out += "," + detail::format_number(c.learning_rate);
  out += "," + detail::format_number(c.ema_momentum);
  out += "," + join_seeds(seeds);
  out += "," + format_metric(arm.mean.psds1);
  out += "," + format_metric(arm.mean.psds2);
  out += "," + format_metric(arm.mean.ef1_macro);
  out += "," + format_metric(arm.mean.ef1_micro);
  out += "," + format_metric(arm.mean.ibf1);
  return out;
}

inline std::string metrics_csv(const std::vector<ArmOutcome>& arms) {
  std::string out = std::string(kMetricsCsvHeader) + "\n";
  for (const ArmOutcome& arm : arms) out += metrics_csv_row(arm) + "\n";
  return out;
}

inline constexpr const char* kPerSeedCsvHeader =
    "arm,seed,PSDS1,PSDS2,EF1_mac,EF1_mic,IBF1";

inline std::string per_seed_csv(const std::vector<ArmOutcome>& arms) {
  std::string out = std::string(kPerSeedCsvHeader) + "\n";
  for (const ArmOutcome& arm : arms) {
    for (const SeedOutcome& s : arm.seeds) {
      out += arm.arm + "," + std::to_string(s.seed);
      out += "," + format_metric(s.metrics.psds1);
      out += "," + format_metric(s.metrics.psds2);
      out += "," + format_metric(s.metrics.ef1_macro);
      out += "," + format_metric(s.metrics.ef1_micro);
      out += "," + format_metric(s.metrics.ibf1);
      out += "\n";
    }
  }
  return out;
}

inline constexpr const char* kClasswiseCsvHeader =
    "class_id,profile,baseline_f1,fpsl_f1,delta";

inline std::string classwise_csv(const std::vector<ClasswiseRow>& rows) {
  std::string out = std::string(kClasswiseCsvHeader) + "\n";
  for (const ClasswiseRow& r : rows) {
    out += std::to_string(r.class_id) + "," + r.profile;
    out += "," + format_metric(r.baseline_f1);
    out += "," + format_metric(r.fpsl_f1);
    out += "," + format_metric(r.delta);
    out += "\n";
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

inline std::string dataset_content_hash(const std::vector<ClipRecord>& clips) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const ClipRecord& clip : clips) {
    const std::string line = clip_to_json(clip).dump();
    for (unsigned char ch : line) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  }
  return hash_hex(h);
}

// Reproduction record kept next to every CSV: configs, seeds, dataset hashes.
inline json manifest_json(const std::vector<ArmOutcome>& arms,
                          const std::vector<std::uint64_t>& seeds,
                          const std::string& train_hash, const std::string& eval_hash) {
  json j;
  j["seeds"] = seeds;
  j["train_dataset_hash"] = train_hash;
  j["eval_dataset_hash"] = eval_hash;
  json arm_list = json::array();
  for (const ArmOutcome& arm : arms) {
    arm_list.push_back(json{{"arm", arm.arm},
                            {"config_hash", config_hash(arm.config)},
                            {"config", config_fingerprint(arm.config)}});
  }
  j["arms"] = std::move(arm_list);
  return j;
}

}  // namespace sedlab
