// sedlab/fpsl.hpp

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

// Frame-level pseudo strong label construction. Runs once per clip per
// training step on the current frame posteriors:
//   1. locate each class's maximum-probability frame,
//   2. extend it by win_size frames on both sides (clipped to the clip),
//   3. keep extended frames whose probability clears the confidence
//      threshold,
//   4. zero out rows whose weak label is absent,
//   5. emit a per-frame backprop mask covering the extended windows of
//      every class whose peak clears the threshold (weak labels do not
//      gate the mask).
// The produced labels and mask are targets/selectors: gradients never flow
// through this construction.

#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "sedlab/core.hpp"

namespace sedlab {

struct FpslParams {
  double thresh = 0.6;
  int win_size = 1;
};

inline void check_fpsl_params(const FpslParams& p) {
  if (!(p.thresh > 0.0 && p.thresh < 1.0))
    throw std::invalid_argument("fpsl thresh must lie in (0,1)");
  if (p.win_size < 0)
    throw std::invalid_argument("fpsl win_size must be >= 0");
}

// Per class, the earliest frame holding the row maximum.
inline std::vector<int> locate_maxima(const FrameGrid& output) {
  std::vector<int> t_star(static_cast<std::size_t>(output.num_classes), 0);
  for (int c = 0; c < output.num_classes; ++c) {
    int best = 0;
    for (int t = 1; t < output.num_frames; ++t) {
      if (output.at(c, t) > output.at(c, best)) best = t;
    }
    t_star[static_cast<std::size_t>(c)] = best;
  }
  return t_star;
}

// {t_star - win_size, ..., t_star + win_size} clipped to [0, num_frames).
inline std::vector<int> extend_window(int t_star, int win_size, int num_frames) {
  if (t_star < 0 || t_star >= num_frames)
    throw std::invalid_argument("extend_window: t_star out of range");
  const int lo = std::max(0, t_star - win_size);
  const int hi = std::min(num_frames - 1, t_star + win_size);
  std::vector<int> frames;
  frames.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int t = lo; t <= hi; ++t) frames.push_back(t);
  return frames;
}

inline PseudoLabelSet build_fpsl(const FrameGrid& output, const WeakLabels& weak,
                                 const FpslParams& params) {
  check_fpsl_params(params);
  const int num_classes = output.num_classes;
  const int num_frames = output.num_frames;
  if (weak.num_classes() != num_classes)
    throw std::invalid_argument("build_fpsl: weak labels and output disagree on class count");

  const std::vector<int> t_star = locate_maxima(output);

  PseudoLabelSet out;
  out.labels = FrameGrid::zeros(num_classes, num_frames);
  out.mask.values.assign(static_cast<std::size_t>(num_frames), 0);

  for (int c = 0; c < num_classes; ++c) {
    const int peak = t_star[static_cast<std::size_t>(c)];
    const std::vector<int> window = extend_window(peak, params.win_size, num_frames);

    // The mask ignores weak labels: any class whose peak clears the
    // threshold contributes its window.
    if (output.at(c, peak) >= params.thresh) {
      for (int t : window) out.mask.values[static_cast<std::size_t>(t)] = 1;
    }

    if (weak.values[static_cast<std::size_t>(c)] == 1) {
      for (int t : window) {
        if (output.at(c, t) >= params.thresh) out.labels.at(c, t) = 1.0;
      }
    }
  }
  return out;
}

}  // namespace sedlab
