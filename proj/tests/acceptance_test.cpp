// sedlab/tests/acceptance_test.cpp

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

// Release gate for the library: ten numbered criteria, one PASS/FAIL line
// each. The first six are exact (oracle equivalence, label monotonicity,
// finite-difference gradients, the weak-only reduction, metric and decode
// fixtures); the last four train real arms on the desk-dcase scene and check
// the directional claims plus byte-level reproducibility. Exit code 0 only
// when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sedlab/experiment.hpp"
#include "sedlab/selftest.hpp"
#include "sedlab/synthgen.hpp"

namespace sedlab {
namespace {

// --- Criterion 4 support ------------------------------------------------------

// A from-scratch weakly supervised training loop with the frame-level pseudo
// label machinery left out entirely: no pseudo label construction, no frame
// loss, no frame-loss gradients. It mirrors train()'s arithmetic step for
// step, so a run of train() whose frame term is inert must match it bit for
// bit. Kept local to this binary on purpose.
TrainResult train_weak_only(const std::vector<ClipRecord>& dataset,
                            const ExperimentConfig& cfg, std::uint64_t seed) {
  const int f = dataset.front().features.rows;
  const int c = static_cast<int>(dataset.front().weak.values.size());
  ModelConfig mc;
  mc.num_features = f;
  mc.num_classes = c;
  mc.conv_channels = cfg.conv_channels;
  mc.conv_kernel = cfg.conv_kernel;
  mc.pooling = cfg.pooling;

  Rng rng(seed);
  TrainResult result;
  result.student = init_model(mc, &rng);
  result.teacher.params = result.student;
  result.teacher.momentum = cfg.ema_momentum;
  AdamState adam = make_adam_state(result.student);

  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double weak_sum = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      result.student.zero_grad();
      for (std::size_t i = start; i < stop; ++i) {
        const ClipRecord& clip = dataset[order[i]];
        const ForwardTrace tr = forward(result.student, clip.features);
        std::vector<double> dclip(static_cast<std::size_t>(c), 0.0);
        weak_loss_backward(tr.clip_probs, clip.weak, &dclip);
        for (auto& g : dclip) g *= inv_batch;
        weak_sum += weak_loss(tr.clip_probs, clip.weak);
        Matrix dpost(c, tr.posteriors.num_frames);
        backward(&result.student, clip.features, tr, dpost, dclip);
      }
      adam_step(&result.student, &adam, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                cfg.adam_eps);
      ema_update(&result.teacher, result.student);
    }
    TrainLogEntry entry;
    entry.epoch = epoch;
    entry.weak_loss = weak_sum / static_cast<double>(n);
    entry.fpsl_loss = 0.0;
    entry.total_loss = entry.weak_loss;
    result.log.push_back(entry);
  }
  return result;
}

bool same_tensors(const ModelParams& a, const ModelParams& b) {
  const auto ta = a.named_tensors();
  const auto tb = b.named_tensors();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].second->shape != tb[i].second->shape) return false;
    if (ta[i].second->data != tb[i].second->data) return false;
  }
  return true;
}

bool same_run(const TrainResult& a, const TrainResult& b) {
  if (!same_tensors(a.student, b.student)) return false;
  if (!same_tensors(a.teacher.params, b.teacher.params)) return false;
  if (a.log.size() != b.log.size()) return false;
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    if (a.log[i].epoch != b.log[i].epoch) return false;
    if (a.log[i].weak_loss != b.log[i].weak_loss) return false;
    if (a.log[i].fpsl_loss != b.log[i].fpsl_loss) return false;
    if (a.log[i].total_loss != b.log[i].total_loss) return false;
  }
  return true;
}

// --- Shared state & small helpers ---------------------------------------------

struct AcceptanceState {
  std::vector<FpslInstance> instances;    // criteria 1 and 2
  std::vector<ClipRecord> train_set;      // criteria 7..10
  std::vector<ClipRecord> eval_set;
  ArmOutcome fpsl_arm;
  ArmOutcome baseline_arm;
  bool arms_ready = false;
  std::string first_metrics_csv;          // criterion 10 compares against these
  std::string first_per_seed_csv;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

EvalPair make_pair_of(const std::string& id, double dur, std::vector<Event> refs,
                      std::vector<Event> hyps) {
  return EvalPair{id, dur, std::move(refs), std::move(hyps)};
}

std::map<double, std::vector<EvalPair>> replicate(const std::vector<EvalPair>& pairs,
                                                  const std::vector<double>& ops) {
  std::map<double, std::vector<EvalPair>> per_op;
  for (double op : ops) per_op[op] = pairs;
  return per_op;
}

const std::vector<std::uint64_t> kSeeds = {1, 2, 3};

ExperimentConfig default_config() { return ExperimentConfig{}; }

// --- The criteria ---------------------------------------------------------------

std::string criterion_oracle_equivalence(AcceptanceState* state) {
  Rng rng(20260814);
  state->instances.clear();
  state->instances.reserve(1000);
  for (int i = 0; i < 1000; ++i) state->instances.push_back(random_fpsl_instance(&rng));
  for (std::size_t i = 0; i < state->instances.size(); ++i) {
    const FpslInstance& inst = state->instances[i];
    if (!pseudo_equal(build_fpsl(inst.output, inst.weak, inst.params),
                      fpsl_oracle(inst.output, inst.weak, inst.params)))
      return "instance " + std::to_string(i) + " disagrees with the reference";
  }

  FrameGrid grid = FrameGrid::zeros(2, 5);
  const double row0[] = {0.1, 0.7, 0.9, 0.4, 0.2};
  const double row1[] = {0.5, 0.3, 0.2, 0.8, 0.1};
  for (int t = 0; t < 5; ++t) {
    grid.at(0, t) = row0[t];
    grid.at(1, t) = row1[t];
  }
  WeakLabels weak;
  weak.values = {1, 0};
  const PseudoLabelSet got = build_fpsl(grid, weak, FpslParams{0.6, 1});
  const double labels0[] = {0, 1, 1, 0, 0};
  const int mask[] = {0, 1, 1, 1, 1};
  for (int t = 0; t < 5; ++t) {
    if (got.labels.at(0, t) != labels0[t]) return "hand trace: labels row 0 wrong";
    if (got.labels.at(1, t) != 0.0) return "hand trace: untagged row not zero";
    if ((got.mask.values[static_cast<std::size_t>(t)] != 0) != (mask[t] != 0))
      return "hand trace: mask wrong";
  }
  return "";
}

std::string criterion_monotonicity(const AcceptanceState& state) {
  if (state.instances.size() != 1000) return "instances from criterion 1 unavailable";
  for (std::size_t i = 0; i < state.instances.size(); ++i) {
    const FpslInstance& inst = state.instances[i];
    const PseudoLabelSet base = build_fpsl(inst.output, inst.weak, inst.params);

    FpslParams wider = inst.params;
    wider.win_size += 1;
    const PseudoLabelSet grown = build_fpsl(inst.output, inst.weak, wider);
    for (std::size_t k = 0; k < base.labels.values.size(); ++k)
      if (base.labels.values[k] == 1.0 && grown.labels.values[k] != 1.0)
        return "instance " + std::to_string(i) + ": wider window removed a label";
    for (std::size_t k = 0; k < base.mask.values.size(); ++k)
      if (base.mask.values[k] != 0 && grown.mask.values[k] == 0)
        return "instance " + std::to_string(i) + ": wider window removed a mask frame";

    FpslParams stricter = inst.params;
    stricter.thresh = std::min(inst.params.thresh + 0.1, 0.99);
    const PseudoLabelSet pruned = build_fpsl(inst.output, inst.weak, stricter);
    for (std::size_t k = 0; k < base.labels.values.size(); ++k)
      if (pruned.labels.values[k] == 1.0 && base.labels.values[k] != 1.0)
        return "instance " + std::to_string(i) + ": higher threshold added a label";
    for (std::size_t k = 0; k < base.mask.values.size(); ++k)
      if (pruned.mask.values[k] != 0 && base.mask.values[k] == 0)
        return "instance " + std::to_string(i) + ": higher threshold added a mask frame";

    for (int c = 0; c < base.labels.num_classes; ++c) {
      if (inst.weak.values[static_cast<std::size_t>(c)] != 0) continue;
      for (int t = 0; t < base.labels.num_frames; ++t)
        if (base.labels.at(c, t) != 0.0)
          return "instance " + std::to_string(i) + ": untagged class received a label";
    }
  }
  return "";
}

std::string criterion_gradients() {
  struct Setup {
    PoolingKind pooling;
    bool with_fpsl;
    double alpha;
  };
  const std::vector<Setup> setups = {
      {PoolingKind::max, false, 0.0},          {PoolingKind::mean, false, 0.0},
      {PoolingKind::linear_softmax, false, 0.0}, {PoolingKind::attention, false, 0.0},
      {PoolingKind::max, true, 0.3},           {PoolingKind::mean, true, 0.3},
      {PoolingKind::linear_softmax, true, 0.3}, {PoolingKind::attention, true, 0.3},
      {PoolingKind::attention, true, 0.7},     {PoolingKind::max, true, 1.0},
  };
  for (std::size_t i = 0; i < setups.size(); ++i) {
    const GradCheckResult res = check_end_to_end_gradients(
        7000 + static_cast<std::uint64_t>(i), 120, setups[i].pooling, setups[i].with_fpsl,
        setups[i].alpha);
    if (res.num_checked < 100)
      return "configuration " + std::to_string(i) + " probed fewer than 100 parameters";
    if (!res.pass)
      return "configuration " + std::to_string(i) +
             " gradient mismatch, max relative error " + fmt(res.max_rel_err);
  }
  return "";
}

std::string criterion_weak_only_reduction() {
  const std::vector<ClipRecord> dataset = generate(desk_dcase_scene(12, 0, 5));
  ExperimentConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.conv_channels = 6;

  ExperimentConfig zero_alpha = cfg;
  zero_alpha.alpha = 0.0;
  zero_alpha.use_fpsl = true;
  const TrainResult with_inert_term = train(dataset, zero_alpha, 11);

  ExperimentConfig disabled = cfg;
  disabled.use_fpsl = false;
  const TrainResult with_flag_off = train(dataset, disabled, 11);

  const TrainResult weak_only = train_weak_only(dataset, cfg, 11);

  if (!same_run(with_inert_term, with_flag_off))
    return "alpha=0 run differs from the use_fpsl=false run";
  if (!same_run(with_inert_term, weak_only))
    return "alpha=0 run differs from the weak-only reimplementation";
  return "";
}

std::string criterion_metric_fixtures() {
  // Event matching inside / outside the collars.
  std::vector<EvalPair> pairs{
      make_pair_of("clip", 10.0, {Event{0, 1.0, 2.0}}, {Event{0, 1.1, 2.05}})};
  const F1Report hit = event_f1(pairs, 0.2, 0.2, 0.2);
  if (hit.tp[0] != 1 || hit.fp[0] != 0 || hit.fn[0] != 0) return "event match counts wrong";
  if (!near(hit.macro_f1, 1.0) || !near(hit.micro_f1, 1.0)) return "event match ratios wrong";
  pairs[0].hypothesis = {Event{0, 1.3, 2.0}};
  const F1Report miss = event_f1(pairs, 0.2, 0.2, 0.2);
  if (miss.tp[0] != 0 || miss.fp[0] != 1 || miss.fn[0] != 1) return "event miss counts wrong";

  // Fractional offset collar: a 10 s reference tolerates 2 s of offset error.
  const F1Report frac = event_f1({make_pair_of("clip", 30.0, {Event{0, 5.0, 15.0}},
                                               {Event{0, 5.1, 16.9}})},
                                 0.2, 0.2, 0.2);
  if (frac.tp[0] != 1) return "fractional offset collar not honored";

  // Intersection counting: half overlap passes dtc = gtc = 0.5.
  const F1Report ib = intersection_f1(
      {make_pair_of("clip", 10.0, {Event{0, 0.5, 1.5}}, {Event{0, 0.0, 1.0}})}, 0.5, 0.5);
  if (ib.tp[0] != 1 || ib.fp[0] != 0 || ib.fn[0] != 0) return "intersection counts wrong";
  if (!near(ib.macro_f1, 1.0)) return "intersection ratio wrong";

  // PSDS of perfect and of empty predictions.
  PsdsParams params = psds1_params();
  params.operating_points = {0.5};
  const std::vector<Event> refs{Event{0, 1.0, 2.0}};
  if (!near(psds(replicate({make_pair_of("c", 600.0, refs, refs)}, {0.5}), params, 600.0, 1),
            1.0))
    return "perfect predictions do not score 1";
  if (psds(replicate({make_pair_of("c", 600.0, refs, {})}, {0.5}), params, 600.0, 1) != 0.0)
    return "empty predictions do not score 0";

  // Two-operating-point ROC with a hand-integrated area of 0.75.
  const std::vector<Event> roc_refs = {{0, 0.0, 10.0}, {0, 20.0, 30.0}};
  std::map<double, std::vector<EvalPair>> per_op;
  per_op[0.3] = {make_pair_of("a", 3600.0, roc_refs,
                              {{0, 0.0, 10.0}, {0, 20.0, 30.0}, {0, 100.0, 110.0}})};
  per_op[0.7] = {make_pair_of("a", 3600.0, roc_refs, {{0, 0.0, 10.0}})};
  PsdsParams roc = psds1_params();
  roc.alpha_st = 0.0;
  roc.e_max = 2.0;
  roc.operating_points = {0.3, 0.7};
  if (!near(psds(per_op, roc, 3600.0, 1), 0.75)) return "step ROC area wrong";

  // Cross triggers: one spurious class-1 event on class 0's reference doubles
  // class 1's effective FPR when alpha_ct = 0.5.
  const std::vector<EvalPair> ct_pairs = {make_pair_of(
      "a", 3600.0, {{0, 0.0, 1800.0}, {1, 1800.0, 3600.0}},
      {{0, 0.0, 1800.0}, {1, 1800.0, 3600.0}, {1, 0.0, 1800.0}})};
  PsdsParams ct;
  ct.dtc_threshold = 0.7;
  ct.gtc_threshold = 0.7;
  ct.cttc_threshold = 0.3;
  ct.alpha_st = 0.0;
  ct.e_max = 2.0;
  ct.operating_points = {0.5};
  ct.alpha_ct = 0.5;
  if (!near(psds(replicate(ct_pairs, {0.5}), ct, 3600.0, 2), 0.5))
    return "cross trigger penalty wrong";
  ct.alpha_ct = 0.0;
  if (!near(psds(replicate(ct_pairs, {0.5}), ct, 3600.0, 2), 0.75))
    return "cross trigger baseline wrong";
  return "";
}

std::string criterion_decode_fixtures() {
  if (median_filter({0, 1, 0, 1, 0}, 3) != std::vector<std::uint8_t>({0, 0, 1, 0, 0}))
    return "alternating median trace wrong";
  const std::vector<std::uint8_t> plateau{0, 0, 1, 1, 1, 0, 0};
  if (median_filter(plateau, 3) != plateau) return "plateau not preserved";
  const std::vector<std::uint8_t> track{1, 0, 1, 1, 0, 0, 1};
  if (median_filter(track, 1) != track) return "size 1 is not the identity";

  std::vector<std::uint8_t> spike(31, 0);
  spike[15] = 1;
  for (std::uint8_t v : median_filter(spike, 7))
    if (v != 0) return "size 7 keeps an isolated spike";
  std::vector<std::uint8_t> run(31, 0);
  for (int t = 10; t < 20; ++t) run[static_cast<std::size_t>(t)] = 1;
  if (median_filter(run, 7) != run) return "size 7 erodes a 10-frame run";

  const auto events = segments_to_events({0, 0, 1, 1, 1, 0}, 4, 25.0);
  if (events.size() != 1 || !(events[0] == Event{4, 0.08, 0.2}))
    return "segment extraction trace wrong";

  FrameGrid grid = FrameGrid::zeros(2, 5);
  const double row0[] = {0.2, 0.9, 0.8, 0.7, 0.1};
  const double row1[] = {0.1, 0.1, 0.9, 0.1, 0.1};
  for (int t = 0; t < 5; ++t) {
    grid.at(0, t) = row0[t];
    grid.at(1, t) = row1[t];
  }
  DecodeParams dp;
  dp.binarize_thresh = 0.5;
  dp.median_size = 3;
  dp.frame_rate_hz = 25.0;
  const auto decoded = decode(grid, dp);
  if (decoded.size() != 1 || !(decoded[0] == Event{0, 0.04, 0.16}))
    return "decode composition trace wrong";
  return "";
}

std::string criterion_fpsl_trend(AcceptanceState* state) {
  state->train_set = generate(desk_dcase_scene(600, 0, 7));
  state->eval_set = generate(desk_dcase_scene(200, 600, 7));
  const ExperimentConfig cfg = default_config();
  ExperimentConfig baseline_cfg = cfg;
  baseline_cfg.use_fpsl = false;

  state->fpsl_arm = run_arm("fpsl", state->train_set, state->eval_set, cfg, kSeeds);
  state->baseline_arm =
      run_arm("baseline", state->train_set, state->eval_set, baseline_cfg, kSeeds);
  state->arms_ready = true;
  state->first_metrics_csv = metrics_csv({state->baseline_arm, state->fpsl_arm});
  state->first_per_seed_csv = per_seed_csv({state->baseline_arm, state->fpsl_arm});

  if (!(state->fpsl_arm.mean.ibf1 > state->baseline_arm.mean.ibf1))
    return "seed-mean intersection F1 " + fmt(state->fpsl_arm.mean.ibf1) +
           " does not exceed the baseline's " + fmt(state->baseline_arm.mean.ibf1);
  if (!(state->fpsl_arm.mean.ef1_macro > state->baseline_arm.mean.ef1_macro))
    return "seed-mean event macro F1 " + fmt(state->fpsl_arm.mean.ef1_macro) +
           " does not exceed the baseline's " + fmt(state->baseline_arm.mean.ef1_macro);
  return "";
}

std::string criterion_window_trend(const AcceptanceState& state) {
  if (!state.arms_ready) return "arms from criterion 7 unavailable";
  ExperimentConfig wide = default_config();
  wide.win_size = 16;
  const ArmOutcome win16 = run_arm("win16", state.train_set, state.eval_set, wide, kSeeds);
  if (!(win16.mean.ibf1 <= state.fpsl_arm.mean.ibf1))
    return "win_size=16 intersection F1 " + fmt(win16.mean.ibf1) +
           " exceeds win_size=1's " + fmt(state.fpsl_arm.mean.ibf1);
  return "";
}

std::string criterion_duration_dependence(const AcceptanceState& state) {
  if (!state.arms_ready) return "arms from criterion 7 unavailable";
  const SceneConfig scene = desk_dcase_scene(0, 0, 7);
  std::vector<std::string> profiles;
  for (const ClassProfile& p : scene.profiles) profiles.push_back(to_string(p.stationarity));
  const auto rows = classwise_report(state.baseline_arm, state.fpsl_arm, profiles);

  double transient_delta = 0.0, stationary_delta = 0.0;
  int transient_n = 0, stationary_n = 0;
  for (const ClasswiseRow& row : rows) {
    if (row.profile == "transient") {
      transient_delta += row.delta;
      ++transient_n;
    } else {
      stationary_delta += row.delta;
      ++stationary_n;
    }
  }
  if (transient_n == 0 || stationary_n == 0) return "scene lacks one of the profiles";
  transient_delta /= transient_n;
  stationary_delta /= stationary_n;
  if (!(transient_delta > stationary_delta))
    return "mean transient delta " + fmt(transient_delta) +
           " does not exceed mean stationary delta " + fmt(stationary_delta);
  return "";
}

std::string criterion_determinism(const AcceptanceState& state) {
  if (!state.arms_ready) return "arms from criterion 7 unavailable";
  const std::vector<ClipRecord> train_set = generate(desk_dcase_scene(600, 0, 7));
  const std::vector<ClipRecord> eval_set = generate(desk_dcase_scene(200, 600, 7));
  const ExperimentConfig cfg = default_config();
  ExperimentConfig baseline_cfg = cfg;
  baseline_cfg.use_fpsl = false;
  const ArmOutcome fpsl_arm = run_arm("fpsl", train_set, eval_set, cfg, kSeeds);
  const ArmOutcome baseline_arm =
      run_arm("baseline", train_set, eval_set, baseline_cfg, kSeeds);
  if (metrics_csv({baseline_arm, fpsl_arm}) != state.first_metrics_csv)
    return "metrics CSV differs between identical runs";
  if (per_seed_csv({baseline_arm, fpsl_arm}) != state.first_per_seed_csv)
    return "per-seed CSV differs between identical runs";
  return "";
}

}  // namespace
}  // namespace sedlab

int main() {
  using sedlab::AcceptanceState;
  AcceptanceState state;
  int failed = 0;

  struct Criterion {
    int id;
    const char* title;
    double budget_s;  // 0 = untimed
    std::function<std::string()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "pseudo label builder matches the exhaustive reference on 1000 instances", 5.0,
       [&] { return sedlab::criterion_oracle_equivalence(&state); }},
      {2, "pseudo label monotonicity properties hold on the same instances", 0.0,
       [&] { return sedlab::criterion_monotonicity(state); }},
      {3, "analytic gradients match finite differences on 10 configurations", 60.0,
       [&] { return sedlab::criterion_gradients(); }},
      {4, "alpha=0 training is bit-identical to a weak-only training loop", 0.0,
       [&] { return sedlab::criterion_weak_only_reduction(); }},
      {5, "metric fixtures reproduce their hand-derived values", 0.0,
       [&] { return sedlab::criterion_metric_fixtures(); }},
      {6, "median filter and decode fixtures match their hand traces", 0.0,
       [&] { return sedlab::criterion_decode_fixtures(); }},
      {7, "FPSL beats the weak-only baseline on the desk-dcase scene", 900.0,
       [&] { return sedlab::criterion_fpsl_trend(&state); }},
      {8, "widening the pseudo label window to 16 does not help", 0.0,
       [&] { return sedlab::criterion_window_trend(state); }},
      {9, "transient classes gain more than stationary classes", 0.0,
       [&] { return sedlab::criterion_duration_dependence(state); }},
      {10, "repeating the trend experiment reproduces the CSVs byte for byte", 0.0,
       [&] { return sedlab::criterion_determinism(state); }},
  };

  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string failure;
    try {
      failure = c.body();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (failure.empty() && c.budget_s > 0.0 && secs > c.budget_s) {
      std::ostringstream s;
      s << "took " << secs << " s, budget " << c.budget_s << " s";
      failure = s.str();
    }
    if (!failure.empty()) ++failed;
    std::printf("%s  criterion %2d: %s (%.1f s)%s%s\n", failure.empty() ? "PASS" : "FAIL",
                c.id, c.title, secs, failure.empty() ? "" : "  -- ", failure.c_str());
    std::fflush(stdout);
  }

  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
