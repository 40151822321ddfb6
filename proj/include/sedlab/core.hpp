// sedlab/core.hpp

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

// Shared domain types for the weakly supervised sound event detection lab:
// frame posterior grids, weak clip tags, pseudo-label sets, timed events,
// the dataset record model, and the experiment configuration.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sedlab {

// Generic row-major matrix of 64-bit reals. Used for features, logits and
// gradients; FrameGrid below is the domain-specific probability grid.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Per-class per-frame posteriors in [0, 1], row-major by class. Also carries
// binary grids (pseudo labels), which are the degenerate {0, 1} case.
struct FrameGrid {
  int num_classes = 0;
  int num_frames = 0;
  std::vector<double> values;

  FrameGrid() = default;
  FrameGrid(int c, int t, double fill = 0.0)
      : num_classes(c), num_frames(t),
        values(static_cast<std::size_t>(c) * t, fill) {}

  static FrameGrid zeros(int c, int t) { return FrameGrid(c, t, 0.0); }

  double& at(int c, int t) {
    return values[static_cast<std::size_t>(c) * num_frames + t];
  }
  double at(int c, int t) const {
    return values[static_cast<std::size_t>(c) * num_frames + t];
  }
};

// Clip-level binary tags, one entry per class.
struct WeakLabels {
  std::vector<int> values;

  WeakLabels() = default;
  explicit WeakLabels(std::vector<int> v) : values(std::move(v)) {}

  int num_classes() const { return static_cast<int>(values.size()); }
};

// Per-frame selector restricting the pseudo-strong loss to frames near
// confident class maxima. One value per frame, broadcast over classes.
struct BackpropMask {
  std::vector<int> values;

  int num_frames() const { return static_cast<int>(values.size()); }
};

// Binary pseudo strong labels plus the frame selector that gates which
// columns contribute to the pseudo-strong loss. The two are independent
// artifacts of the construction; only their frame counts must agree.
struct PseudoLabelSet {
  FrameGrid labels;
  BackpropMask mask;
};

// A timed detection or annotation: class index plus onset/offset seconds.
struct Event {
  int class_id = 0;
  double onset_s = 0.0;
  double offset_s = 0.0;

  friend bool operator==(const Event& a, const Event& b) {
    return a.class_id == b.class_id && a.onset_s == b.onset_s &&
           a.offset_s == b.offset_s;
  }
};

// One dataset clip: pre-computed features, weak tags, and (when available)
// strong ground-truth events. Times are seconds; frames only appear at the
// decode/label boundaries.
struct ClipRecord {
  std::string clip_id;
  double duration_s = 0.0;
  double frame_rate_hz = 0.0;
  Matrix features;  // feature_bins x num_frames
  WeakLabels weak;
  std::vector<Event> events;
};

enum class PoolingKind { max, mean, linear_softmax, attention };

inline std::string to_string(PoolingKind k) {
  switch (k) {
    case PoolingKind::max: return "max";
    case PoolingKind::mean: return "mean";
    case PoolingKind::linear_softmax: return "linear_softmax";
    case PoolingKind::attention: return "attention";
  }
  return "attention";
}

inline PoolingKind pooling_from_string(const std::string& s) {
  if (s == "max") return PoolingKind::max;
  if (s == "mean") return PoolingKind::mean;
  if (s == "linear_softmax") return PoolingKind::linear_softmax;
  if (s == "attention") return PoolingKind::attention;
  throw std::invalid_argument("unknown pooling kind: " + s);
}

// Every hyperparameter of a single training/evaluation run. Values that are
// probabilities or thresholds live in (0, 1); median_size must be odd.
struct ExperimentConfig {
  // Pseudo label construction
  double thresh = 0.6;
  int win_size = 1;
  double alpha = 0.3;
  bool use_fpsl = true;

  // Decoding
  double binarize_thresh = 0.5;
  int median_size = 7;

  // Model / optimizer
  PoolingKind pooling = PoolingKind::attention;
  int epochs = 60;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double ema_momentum = 0.999;
  std::uint64_t seed = 1;
  int conv_channels = 16;
  int conv_kernel = 3;

  // Model output frame rate (no temporal downsampling, so this equals the
  // dataset feature rate).
  double frame_rate_hz = 25.0;

  // Event-based F1 collars
  double onset_collar_s = 0.2;
  double offset_collar_s = 0.2;
  double offset_collar_frac = 0.2;

  // Intersection-based F1 operating point
  double ib_dtc = 0.5;
  double ib_gtc = 0.5;

  // PSDS scenario 1: localization-heavy, no cross-trigger penalty.
  double psds1_dtc = 0.7;
  double psds1_gtc = 0.7;
  double psds1_cttc = 0.3;  // unused while alpha_ct is 0
  double psds1_alpha_ct = 0.0;
  double psds1_alpha_st = 1.0;

  // PSDS scenario 2: tagging-heavy with cross-trigger penalties.
  double psds2_dtc = 0.1;
  double psds2_gtc = 0.1;
  double psds2_cttc = 0.3;
  double psds2_alpha_ct = 0.5;
  double psds2_alpha_st = 1.0;

  double psds_e_max = 100.0;  // false positives per hour
  int psds_num_operating_points = 50;
};

// Binarization thresholds used for the PSDS ROC. The default 50-point grid
// is {0.01, 0.03, ..., 0.99}; other counts spread evenly over the same span.
inline std::vector<double> psds_operating_points(int n = 50) {
  std::vector<double> ops;
  ops.reserve(n);
  if (n == 1) {
    ops.push_back(0.5);
    return ops;
  }
  if (n == 50) {
    for (int k = 0; k < n; ++k) ops.push_back((1 + 2 * k) / 100.0);
    return ops;
  }
  for (int k = 0; k < n; ++k) ops.push_back(0.01 + k * (0.98 / (n - 1)));
  return ops;
}

inline bool probability_like(double v) { return v > 0.0 && v < 1.0; }

inline std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> v;
  if (!probability_like(c.thresh)) v.push_back("thresh must lie in (0,1)");
  if (c.win_size < 0) v.push_back("win_size must be >= 0");
  if (c.alpha < 0) v.push_back("alpha must be >= 0");
  if (!probability_like(c.binarize_thresh)) v.push_back("binarize_thresh must lie in (0,1)");
  if (c.median_size <= 0 || c.median_size % 2 == 0) v.push_back("median_size must be odd and positive");
  if (c.epochs <= 0) v.push_back("epochs must be positive");
  if (c.batch_size <= 0) v.push_back("batch_size must be positive");
  if (c.learning_rate <= 0) v.push_back("learning_rate must be positive");
  if (c.ema_momentum < 0 || c.ema_momentum >= 1) v.push_back("ema_momentum must lie in [0,1)");
  if (c.conv_channels <= 0) v.push_back("conv_channels must be positive");
  if (c.conv_kernel <= 0 || c.conv_kernel % 2 == 0) v.push_back("conv_kernel must be odd and positive");
  if (c.frame_rate_hz <= 0) v.push_back("frame_rate_hz must be positive");
  if (c.onset_collar_s <= 0 || c.offset_collar_s <= 0) v.push_back("collars must be positive");
  if (!(c.ib_dtc > 0 && c.ib_dtc <= 1) || !(c.ib_gtc > 0 && c.ib_gtc <= 1))
    v.push_back("intersection criteria must lie in (0,1]");
  for (double t : {c.psds1_dtc, c.psds1_gtc, c.psds2_dtc, c.psds2_gtc, c.psds1_cttc, c.psds2_cttc})
    if (!(t > 0 && t <= 1)) v.push_back("psds tolerance criteria must lie in (0,1]");
  if (c.psds1_alpha_ct < 0 || c.psds2_alpha_ct < 0 || c.psds1_alpha_st < 0 || c.psds2_alpha_st < 0)
    v.push_back("psds alpha weights must be >= 0");
  if (c.psds_e_max <= 0) v.push_back("psds_e_max must be positive");
  if (c.psds_num_operating_points <= 0) v.push_back("psds_num_operating_points must be positive");
  return v;
}

// Checks every record invariant and reports all violations; an empty result
// means the clip is well formed. Violations are data, not failures.
inline std::vector<std::string> validate_clip(const ClipRecord& r) {
  std::vector<std::string> v;
  if (r.duration_s <= 0) v.push_back("non-positive duration");
  if (r.frame_rate_hz <= 0) v.push_back("non-positive frame rate");
  if (r.features.rows < 0 || r.features.cols < 0 ||
      r.features.data.size() !=
          static_cast<std::size_t>(r.features.rows) * r.features.cols)
    v.push_back("malformed matrix: feature buffer does not match its shape");
  const int num_classes = r.weak.num_classes();
  for (int c = 0; c < num_classes; ++c) {
    if (r.weak.values[c] != 0 && r.weak.values[c] != 1)
      v.push_back("weak label not binary at class " + std::to_string(c));
  }
  std::vector<int> has_event(static_cast<std::size_t>(num_classes), 0);
  for (const Event& e : r.events) {
    if (e.class_id < 0 || e.class_id >= num_classes) {
      v.push_back("event class out of range: " + std::to_string(e.class_id));
      continue;
    }
    if (e.offset_s <= e.onset_s)
      v.push_back("empty event for class " + std::to_string(e.class_id));
    if (e.onset_s < 0 || e.offset_s > r.duration_s)
      v.push_back("event out of range for class " + std::to_string(e.class_id));
    has_event[static_cast<std::size_t>(e.class_id)] = 1;
  }
  for (int c = 0; c < num_classes; ++c) {
    if (has_event[static_cast<std::size_t>(c)] != r.weak.values[c])
      v.push_back("weak/strong mismatch class " + std::to_string(c));
  }
  return v;
}

}  // namespace sedlab
