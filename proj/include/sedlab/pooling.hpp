// sedlab/pooling.hpp

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

// Temporal pooling: aggregates a frame posterior grid into one clip-wise
// probability per class. Every operator keeps its output inside the per-class
// [min, max] frame range. Backward companions accumulate hand-derived
// gradients for the training engine.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sedlab/core.hpp"

namespace sedlab {

// Clip-wise probabilities, one entry per class.
struct ClipProbs {
  std::vector<double> values;

  int num_classes() const { return static_cast<int>(values.size()); }
};

inline ClipProbs pool_max(const FrameGrid& grid) {
  ClipProbs out;
  out.values.resize(static_cast<std::size_t>(grid.num_classes));
  for (int c = 0; c < grid.num_classes; ++c) {
    double best = grid.at(c, 0);
    for (int t = 1; t < grid.num_frames; ++t) best = std::max(best, grid.at(c, t));
    out.values[static_cast<std::size_t>(c)] = best;
  }
  return out;
}

inline ClipProbs pool_mean(const FrameGrid& grid) {
  ClipProbs out;
  out.values.resize(static_cast<std::size_t>(grid.num_classes));
  for (int c = 0; c < grid.num_classes; ++c) {
    double sum = 0.0;
    for (int t = 0; t < grid.num_frames; ++t) sum += grid.at(c, t);
    out.values[static_cast<std::size_t>(c)] = sum / grid.num_frames;
  }
  return out;
}

// sum p^2 / sum p; weights each frame by its own probability, landing between
// mean and max. An all-zero row pools to 0.
inline ClipProbs pool_linear_softmax(const FrameGrid& grid) {
  ClipProbs out;
  out.values.resize(static_cast<std::size_t>(grid.num_classes));
  for (int c = 0; c < grid.num_classes; ++c) {
    double s1 = 0.0, s2 = 0.0;
    for (int t = 0; t < grid.num_frames; ++t) {
      const double p = grid.at(c, t);
      s1 += p;
      s2 += p * p;
    }
    out.values[static_cast<std::size_t>(c)] = (s1 > 0.0) ? s2 / s1 : 0.0;
  }
  return out;
}

// Row-wise softmax over time, numerically stabilized.
inline Matrix attention_weights(const Matrix& logits) {
  Matrix w(logits.rows, logits.cols);
  for (int c = 0; c < logits.rows; ++c) {
    double m = logits.at(c, 0);
    for (int t = 1; t < logits.cols; ++t) m = std::max(m, logits.at(c, t));
    double z = 0.0;
    for (int t = 0; t < logits.cols; ++t) {
      const double e = std::exp(logits.at(c, t) - m);
      w.at(c, t) = e;
      z += e;
    }
    for (int t = 0; t < logits.cols; ++t) w.at(c, t) /= z;
  }
  return w;
}

inline ClipProbs pool_attention(const FrameGrid& grid, const Matrix& attn_logits) {
  if (attn_logits.rows != grid.num_classes || attn_logits.cols != grid.num_frames)
    throw std::invalid_argument("pool_attention: logit shape mismatch");
  const Matrix w = attention_weights(attn_logits);
  ClipProbs out;
  out.values.resize(static_cast<std::size_t>(grid.num_classes));
  for (int c = 0; c < grid.num_classes; ++c) {
    double y = 0.0;
    for (int t = 0; t < grid.num_frames; ++t) y += w.at(c, t) * grid.at(c, t);
    out.values[static_cast<std::size_t>(c)] = y;
  }
  return out;
}

inline ClipProbs pool(const FrameGrid& grid, PoolingKind kind,
                      const Matrix* attn_logits = nullptr) {
  switch (kind) {
    case PoolingKind::max: return pool_max(grid);
    case PoolingKind::mean: return pool_mean(grid);
    case PoolingKind::linear_softmax: return pool_linear_softmax(grid);
    case PoolingKind::attention:
      if (attn_logits == nullptr)
        throw std::invalid_argument("attention pooling needs logits");
      return pool_attention(grid, *attn_logits);
  }
  throw std::invalid_argument("unknown pooling kind");
}

// --- Backward companions ------------------------------------------------
// Each accumulates d(loss)/d(grid) into dgrid given dclip = d(loss)/d(pooled).

// Subgradient routed to the earliest maximizing frame on ties.
inline void pool_max_backward(const FrameGrid& grid, const std::vector<double>& dclip,
                              Matrix* dgrid) {
  for (int c = 0; c < grid.num_classes; ++c) {
    int best = 0;
    for (int t = 1; t < grid.num_frames; ++t) {
      if (grid.at(c, t) > grid.at(c, best)) best = t;
    }
    dgrid->at(c, best) += dclip[static_cast<std::size_t>(c)];
  }
}

inline void pool_mean_backward(const FrameGrid& grid, const std::vector<double>& dclip,
                               Matrix* dgrid) {
  for (int c = 0; c < grid.num_classes; ++c) {
    const double g = dclip[static_cast<std::size_t>(c)] / grid.num_frames;
    for (int t = 0; t < grid.num_frames; ++t) dgrid->at(c, t) += g;
  }
}

// d/dp_t of (sum p^2 / sum p) = (2 p_t - y) / sum p. Zero rows pool to a
// constant, so they get zero gradient.
inline void pool_linear_softmax_backward(const FrameGrid& grid,
                                         const std::vector<double>& dclip,
                                         Matrix* dgrid) {
  for (int c = 0; c < grid.num_classes; ++c) {
    double s1 = 0.0, s2 = 0.0;
    for (int t = 0; t < grid.num_frames; ++t) {
      const double p = grid.at(c, t);
      s1 += p;
      s2 += p * p;
    }
    if (s1 <= 0.0) continue;
    const double y = s2 / s1;
    const double g = dclip[static_cast<std::size_t>(c)];
    for (int t = 0; t < grid.num_frames; ++t) {
      dgrid->at(c, t) += g * (2.0 * grid.at(c, t) - y) / s1;
    }
  }
}

// weights must be attention_weights(logits) from the forward pass.
// d y / d p_t = a_t, d y / d z_t = a_t (p_t - y).
inline void pool_attention_backward(const FrameGrid& grid, const Matrix& weights,
                                    const std::vector<double>& dclip, Matrix* dgrid,
                                    Matrix* dlogits) {
  for (int c = 0; c < grid.num_classes; ++c) {
    double y = 0.0;
    for (int t = 0; t < grid.num_frames; ++t) y += weights.at(c, t) * grid.at(c, t);
    const double g = dclip[static_cast<std::size_t>(c)];
    for (int t = 0; t < grid.num_frames; ++t) {
      const double a = weights.at(c, t);
      dgrid->at(c, t) += g * a;
      dlogits->at(c, t) += g * a * (grid.at(c, t) - y);
    }
  }
}

}  // namespace sedlab
