// sedlab/fpsl_oracle.hpp

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

// Brute-force reference for the pseudo strong label construction. Every cell
// is decided from scratch (argmax rescanned per cell); nothing is shared with
// sedlab/fpsl.hpp so the two routes stay independent. Intentionally naive and
// slow; used by the self test and the verification suites only.

#pragma once

#include <cmath>
#include <stdexcept>

#include "sedlab/core.hpp"
#include "sedlab/fpsl.hpp"  // FpslParams only

namespace sedlab {

inline PseudoLabelSet fpsl_oracle(const FrameGrid& output, const WeakLabels& weak,
                                  const FpslParams& params) {
  if (!(params.thresh > 0.0 && params.thresh < 1.0))
    throw std::invalid_argument("fpsl_oracle: thresh must lie in (0,1)");
  if (params.win_size < 0)
    throw std::invalid_argument("fpsl_oracle: win_size must be >= 0");
  const int num_classes = output.num_classes;
  const int num_frames = output.num_frames;
  if (weak.num_classes() != num_classes)
    throw std::invalid_argument("fpsl_oracle: weak labels and output disagree on class count");

  PseudoLabelSet out;
  out.labels = FrameGrid::zeros(num_classes, num_frames);
  out.mask.values.assign(static_cast<std::size_t>(num_frames), 0);

  for (int c = 0; c < num_classes; ++c) {
    for (int t = 0; t < num_frames; ++t) {
      int peak = 0;
      for (int s = 1; s < num_frames; ++s) {
        if (output.at(c, s) > output.at(c, peak)) peak = s;
      }
      const bool in_window = std::abs(t - peak) <= params.win_size;
      if (in_window && output.at(c, t) >= params.thresh &&
          weak.values[static_cast<std::size_t>(c)] == 1) {
        out.labels.at(c, t) = 1.0;
      }
    }
  }

  for (int t = 0; t < num_frames; ++t) {
    for (int c = 0; c < num_classes; ++c) {
      int peak = 0;
      for (int s = 1; s < num_frames; ++s) {
        if (output.at(c, s) > output.at(c, peak)) peak = s;
      }
      if (std::abs(t - peak) <= params.win_size &&
          output.at(c, peak) >= params.thresh) {
        out.mask.values[static_cast<std::size_t>(t)] = 1;
      }
    }
  }
  return out;
}

}  // namespace sedlab
