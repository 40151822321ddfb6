// sedlab/selftest.hpp

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

// Built-in verification: randomized pseudo-label instances against the naive
// reference, finite-difference gradient probes through the whole model, and
// the hand-derived loss/decode/metric fixtures. The `selftest` subcommand
// runs everything here; the test suite reuses the same generators.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sedlab/core.hpp"
#include "sedlab/decode.hpp"
#include "sedlab/fpsl.hpp"
#include "sedlab/fpsl_oracle.hpp"
#include "sedlab/loss.hpp"
#include "sedlab/metrics.hpp"
#include "sedlab/nnet.hpp"
#include "sedlab/rng.hpp"

namespace sedlab {

// --- Randomized pseudo-label instances --------------------------------------

struct FpslInstance {
  FrameGrid output;
  WeakLabels weak;
  FpslParams params;
};

// C in [1,8], T in [1,50], thresh in {0.3,...,0.7}, win_size in {0,...,8}.
// A few cells are pinned to exactly thresh to exercise the inclusive boundary.
inline FpslInstance random_fpsl_instance(Rng* rng) {
  FpslInstance inst;
  const int c = rng->uniform_int(1, 8);
  const int t = rng->uniform_int(1, 50);
  inst.params.thresh = 0.3 + 0.1 * static_cast<double>(rng->below(5));
  inst.params.win_size = static_cast<int>(rng->below(9));
  inst.output = FrameGrid::zeros(c, t);
  for (auto& v : inst.output.values)
    v = rng->below(20) == 0 ? inst.params.thresh : rng->uniform();
  inst.weak.values.resize(static_cast<std::size_t>(c));
  for (auto& w : inst.weak.values) w = static_cast<int>(rng->below(2));
  return inst;
}

inline bool pseudo_equal(const PseudoLabelSet& a, const PseudoLabelSet& b) {
  return a.labels.num_classes == b.labels.num_classes &&
         a.labels.num_frames == b.labels.num_frames &&
         a.labels.values == b.labels.values && a.mask.values == b.mask.values;
}

// --- End-to-end gradient checking --------------------------------------------

struct GradCheckResult {
  double max_rel_err = 0.0;
  int num_checked = 0;
  bool pass = true;
};

namespace detail {

inline double objective(const ModelParams& params, const Matrix& features,
                        const WeakLabels& weak, const PseudoLabelSet* pseudo,
                        double alpha) {
  const ForwardTrace tr = forward(params, features);
  double loss = weak_loss(tr.clip_probs, weak);
  if (pseudo != nullptr) loss += alpha * fpsl_loss(tr.posteriors, *pseudo);
  return loss;
}

}  // namespace detail

// Draws a random model/clip, freezes the pseudo labels at the starting point
// (they are constants of the objective), computes analytic gradients, and
// probes num_probes random parameters with central differences. A probe
// passes when |analytic - fd| <= 1e-4 * max(|analytic|, |fd|) + 1e-8; the
// absolute floor absorbs cancellation noise on near-zero gradients.
inline GradCheckResult check_end_to_end_gradients(std::uint64_t seed, int num_probes,
                                                  PoolingKind pooling, bool with_fpsl,
                                                  double alpha) {
  Rng rng(seed);
  ModelConfig mc;
  mc.num_classes = rng.uniform_int(2, 5);
  mc.num_features = rng.uniform_int(3, 8);
  mc.conv_channels = rng.uniform_int(3, 8);
  mc.conv_kernel = 1 + 2 * static_cast<int>(rng.below(3));
  mc.pooling = pooling;
  const int frames = rng.uniform_int(6, 14);

  ModelParams params = init_model(mc, &rng);
  Matrix features(mc.num_features, frames);
  for (auto& v : features.data) v = rng.uniform();
  WeakLabels weak;
  weak.values.resize(static_cast<std::size_t>(mc.num_classes));
  for (auto& w : weak.values) w = static_cast<int>(rng.below(2));

  PseudoLabelSet pseudo;
  const PseudoLabelSet* pseudo_ptr = nullptr;
  if (with_fpsl) {
    const ForwardTrace tr0 = forward(params, features);
    // A mid posteriors threshold keeps both label polarities in play.
    pseudo = build_fpsl(tr0.posteriors, weak, FpslParams{0.5, 2});
    pseudo_ptr = &pseudo;
  }

  // Analytic gradients of the frozen objective.
  const ForwardTrace tr = forward(params, features);
  std::vector<double> dclip(static_cast<std::size_t>(mc.num_classes), 0.0);
  weak_loss_backward(tr.clip_probs, weak, &dclip);
  Matrix dpost(mc.num_classes, frames);
  if (pseudo_ptr != nullptr) {
    fpsl_loss_backward(tr.posteriors, *pseudo_ptr, &dpost);
    for (auto& g : dpost.data) g *= alpha;
  }
  params.zero_grad();
  backward(&params, features, tr, dpost, dclip);

  GradCheckResult result;
  auto tensors = params.named_tensors();
  const double h = 1e-4;
  for (int probe = 0; probe < num_probes; ++probe) {
    const auto ti = static_cast<std::size_t>(rng.below(tensors.size()));
    Tensor* tensor = tensors[ti].second;
    const auto ei = static_cast<std::size_t>(rng.below(tensor->size()));
    const double saved = tensor->data[ei];
    tensor->data[ei] = saved + h;
    const double up = detail::objective(params, features, weak, pseudo_ptr, alpha);
    tensor->data[ei] = saved - h;
    const double down = detail::objective(params, features, weak, pseudo_ptr, alpha);
    tensor->data[ei] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double analytic = tensor->grad[ei];
    const double diff = std::abs(analytic - fd);
    const double scale = std::max(std::abs(analytic), std::abs(fd));
    if (diff > 1e-4 * scale + 1e-8) result.pass = false;
    const double rel = diff / std::max(scale, 1e-8);
    if (rel > result.max_rel_err && diff > 1e-8) result.max_rel_err = rel;
    ++result.num_checked;
  }
  return result;
}

// --- Fixture suite -----------------------------------------------------------

struct SelfTestResult {
  int total = 0;
  int failed = 0;
  std::vector<std::string> failures;
};

namespace detail {

inline void run_check(SelfTestResult* r, const std::string& name,
                      const std::function<bool()>& check) {
  ++r->total;
  bool ok = false;
  std::string note;
  try {
    ok = check();
  } catch (const std::exception& e) {
    note = std::string(": ") + e.what();
  }
  if (!ok) {
    ++r->failed;
    r->failures.push_back(name + note);
  }
}

inline bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

}  // namespace detail

inline SelfTestResult run_selftests() {
  SelfTestResult r;

  detail::run_check(&r, "fpsl matches naive reference on random instances", [] {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
      const FpslInstance inst = random_fpsl_instance(&rng);
      if (!pseudo_equal(build_fpsl(inst.output, inst.weak, inst.params),
                        fpsl_oracle(inst.output, inst.weak, inst.params)))
        return false;
    }
    return true;
  });

  detail::run_check(&r, "fpsl hand trace", [] {
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
    const std::vector<double> labels0{0, 1, 1, 0, 0};
    for (int t = 0; t < 5; ++t) {
      if (got.labels.at(0, t) != labels0[static_cast<std::size_t>(t)]) return false;
      if (got.labels.at(1, t) != 0.0) return false;
    }
    const std::vector<std::uint8_t> mask{0, 1, 1, 1, 1};
    for (int t = 0; t < 5; ++t)
      if ((got.mask.values[static_cast<std::size_t>(t)] != 0) != (mask[static_cast<std::size_t>(t)] != 0))
        return false;
    return true;
  });

  detail::run_check(&r, "gradients match finite differences", [] {
    const PoolingKind kinds[] = {PoolingKind::max, PoolingKind::mean,
                                 PoolingKind::linear_softmax, PoolingKind::attention};
    for (int i = 0; i < 4; ++i) {
      const auto res = check_end_to_end_gradients(900 + static_cast<std::uint64_t>(i), 40,
                                                  kinds[i], true, 0.3);
      if (!res.pass) return false;
    }
    return true;
  });

  detail::run_check(&r, "loss fixtures", [] {
    if (!detail::near(bce(0.5, 1.0), std::log(2.0))) return false;
    if (bce(1.0, 1.0) > 2e-7) return false;
    if (bce(0.0, 0.0) > 2e-7) return false;
    FrameGrid probs = FrameGrid::zeros(1, 3);
    probs.at(0, 0) = 0.9;
    probs.at(0, 1) = 0.5;
    probs.at(0, 2) = 0.1;
    PseudoLabelSet pseudo;
    pseudo.labels = FrameGrid::zeros(1, 3);
    pseudo.labels.at(0, 0) = 1.0;
    pseudo.labels.at(0, 1) = 1.0;
    pseudo.mask.values = {1, 1, 0};
    const double expected = -(std::log(0.9) + std::log(0.5)) / 2.0;
    return detail::near(fpsl_loss(probs, pseudo), expected);
  });

  detail::run_check(&r, "decode fixtures", [] {
    const std::vector<std::uint8_t> alternating{0, 1, 0, 1, 0};
    if (median_filter(alternating, 3) != std::vector<std::uint8_t>{0, 0, 1, 0, 0})
      return false;
    const std::vector<std::uint8_t> plateau{0, 0, 1, 1, 1, 0, 0};
    if (median_filter(plateau, 3) != plateau) return false;
    const auto events = segments_to_events({0, 0, 1, 1, 1, 0}, 4, 25.0);
    if (events.size() != 1) return false;
    if (!(events[0] == Event{4, 0.08, 0.2})) return false;
    std::vector<std::uint8_t> spike(31, 0);
    spike[15] = 1;
    for (std::uint8_t v : median_filter(spike, 7))
      if (v != 0) return false;
    return true;
  });

  detail::run_check(&r, "metric fixtures", [] {
    std::vector<EvalPair> pairs{{"clip", 10.0,
                                 {Event{0, 1.0, 2.0}},
                                 {Event{0, 1.1, 2.05}}}};
    const F1Report hit = event_f1(pairs, 0.2, 0.2, 0.2);
    if (!detail::near(hit.macro_f1, 1.0) || !detail::near(hit.micro_f1, 1.0)) return false;
    pairs[0].hypothesis = {Event{0, 1.3, 2.0}};
    const F1Report miss = event_f1(pairs, 0.2, 0.2, 0.2);
    if (miss.tp[0] != 0 || miss.fp[0] != 1 || miss.fn[0] != 1) return false;

    std::vector<EvalPair> ib{{"clip", 10.0, {Event{0, 0.5, 1.5}}, {Event{0, 0.0, 1.0}}}};
    const F1Report ib_rep = intersection_f1(ib, 0.5, 0.5);
    if (ib_rep.tp[0] != 1 || ib_rep.fp[0] != 0 || ib_rep.fn[0] != 0) return false;

    PsdsParams params = psds1_params();
    params.operating_points = {0.5};
    std::map<double, std::vector<EvalPair>> perfect{
        {0.5, {{"clip", 600.0, {Event{0, 1.0, 2.0}}, {Event{0, 1.0, 2.0}}}}}};
    if (!detail::near(psds(perfect, params, 600.0, 1), 1.0)) return false;
    std::map<double, std::vector<EvalPair>> empty{
        {0.5, {{"clip", 600.0, {Event{0, 1.0, 2.0}}, {}}}}};
    if (!detail::near(psds(empty, params, 600.0, 1), 0.0)) return false;
    return true;
  });

  return r;
}

}  // namespace sedlab
