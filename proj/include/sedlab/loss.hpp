// sedlab/loss.hpp

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

// Training objective: clip-level BCE against the weak labels plus an
// alpha-weighted frame-level BCE against the pseudo strong labels, the latter
// restricted to frames picked out by the backprop mask.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sedlab/core.hpp"
#include "sedlab/fpsl.hpp"
#include "sedlab/pooling.hpp"

namespace sedlab {

inline constexpr double kBceEps = 1e-7;

// Binary cross entropy with the prediction clamped to [eps, 1 - eps] so the
// logs stay finite for saturated predictions.
inline double bce(double pred, double target) {
  const double p = std::clamp(pred, kBceEps, 1.0 - kBceEps);
  return -(target * std::log(p) + (1.0 - target) * std::log1p(-p));
}

// d bce / d pred. Zero outside the clamp range, matching the flat forward.
inline double bce_dpred(double pred, double target) {
  if (pred < kBceEps || pred > 1.0 - kBceEps) return 0.0;
  return (1.0 - target) / (1.0 - pred) - target / pred;
}

// Clip-level term: mean BCE over classes.
inline double weak_loss(const ClipProbs& pred, const WeakLabels& weak) {
  if (pred.num_classes() != weak.num_classes())
    throw std::invalid_argument("weak_loss: class count mismatch");
  double sum = 0.0;
  for (int c = 0; c < pred.num_classes(); ++c) {
    sum += bce(pred.values[static_cast<std::size_t>(c)],
               static_cast<double>(weak.values[static_cast<std::size_t>(c)]));
  }
  return sum / pred.num_classes();
}

// Accumulates d weak_loss / d pred into dpred.
inline void weak_loss_backward(const ClipProbs& pred, const WeakLabels& weak,
                               std::vector<double>* dpred) {
  const double inv = 1.0 / pred.num_classes();
  for (int c = 0; c < pred.num_classes(); ++c) {
    const auto i = static_cast<std::size_t>(c);
    (*dpred)[i] += inv * bce_dpred(pred.values[i],
                                   static_cast<double>(weak.values[i]));
  }
}

// Frame-level term: BCE summed over every (class, frame) cell whose frame is
// mask-active, divided by the number of such cells. An empty mask contributes
// exactly zero.
inline double fpsl_loss(const FrameGrid& output, const PseudoLabelSet& pseudo) {
  const FrameGrid& labels = pseudo.labels;
  if (labels.num_classes != output.num_classes ||
      labels.num_frames != output.num_frames)
    throw std::invalid_argument("fpsl_loss: shape mismatch");
  double sum = 0.0;
  long count = 0;
  for (int t = 0; t < output.num_frames; ++t) {
    if (!pseudo.mask.values[static_cast<std::size_t>(t)]) continue;
    for (int c = 0; c < output.num_classes; ++c) {
      sum += bce(output.at(c, t), labels.at(c, t));
      ++count;
    }
  }
  return count > 0 ? sum / count : 0.0;
}

// Accumulates d fpsl_loss / d output into dgrid. No-op on an empty mask.
inline void fpsl_loss_backward(const FrameGrid& output, const PseudoLabelSet& pseudo,
                               Matrix* dgrid) {
  long count = 0;
  for (int t = 0; t < output.num_frames; ++t) {
    if (pseudo.mask.values[static_cast<std::size_t>(t)]) count += output.num_classes;
  }
  if (count == 0) return;
  const double inv = 1.0 / static_cast<double>(count);
  for (int t = 0; t < output.num_frames; ++t) {
    if (!pseudo.mask.values[static_cast<std::size_t>(t)]) continue;
    for (int c = 0; c < output.num_classes; ++c) {
      dgrid->at(c, t) += inv * bce_dpred(output.at(c, t), pseudo.labels.at(c, t));
    }
  }
}

struct LossBreakdown {
  double weak_loss = 0.0;
  double fpsl_loss = 0.0;
  double alpha = 0.0;
  double total = 0.0;
};

// total = weak_loss + alpha * fpsl_loss. The pseudo labels are treated as
// constants: gradients flow only through the predictions.
inline LossBreakdown combined_loss(const ClipProbs& clip_pred, const WeakLabels& weak,
                                   const FrameGrid& output, const PseudoLabelSet& pseudo,
                                   double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("combined_loss: alpha must be >= 0");
  LossBreakdown out;
  out.weak_loss = weak_loss(clip_pred, weak);
  out.fpsl_loss = fpsl_loss(output, pseudo);
  out.alpha = alpha;
  out.total = out.weak_loss + alpha * out.fpsl_loss;
  return out;
}

}  // namespace sedlab
