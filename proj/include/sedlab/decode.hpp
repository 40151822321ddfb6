// sedlab/decode.hpp

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

// Posterior grid -> event list: binarize, clean each class track with a
// binary median filter, then emit one event per maximal run of ones.

#pragma once

#include <stdexcept>
#include <vector>

#include "sedlab/core.hpp"

namespace sedlab {

struct DecodeParams {
  double binarize_thresh = 0.5;
  int median_size = 7;  // odd; 1 disables smoothing
  double frame_rate_hz = 25.0;
};

inline void check_decode_params(const DecodeParams& p) {
  if (!(p.binarize_thresh >= 0.0 && p.binarize_thresh <= 1.0))
    throw std::invalid_argument("binarize_thresh outside [0, 1]");
  if (p.median_size < 1 || p.median_size % 2 == 0)
    throw std::invalid_argument("median_size must be odd and positive");
  if (!(p.frame_rate_hz > 0.0))
    throw std::invalid_argument("frame_rate_hz must be > 0");
}

// value >= thresh counts as active.
inline std::vector<std::vector<uint8_t>> binarize(const FrameGrid& grid, double thresh) {
  std::vector<std::vector<uint8_t>> out(static_cast<std::size_t>(grid.num_classes));
  for (int c = 0; c < grid.num_classes; ++c) {
    auto& row = out[static_cast<std::size_t>(c)];
    row.resize(static_cast<std::size_t>(grid.num_frames));
    for (int t = 0; t < grid.num_frames; ++t)
      row[static_cast<std::size_t>(t)] = grid.at(c, t) >= thresh ? 1 : 0;
  }
  return out;
}

// Binary median over a centered window; frames beyond either edge read as 0.
// With ones >= zeros breaking toward 1 the output at t is 1 iff the window
// holds at least (size + 1) / 2 ones.
inline std::vector<uint8_t> median_filter(const std::vector<uint8_t>& track, int size) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument("median_filter: size must be odd and positive");
  if (size == 1) return track;
  const int n = static_cast<int>(track.size());
  const int half = size / 2;
  const int need = (size + 1) / 2;
  std::vector<uint8_t> out(track.size());
  for (int t = 0; t < n; ++t) {
    int ones = 0;
    for (int k = t - half; k <= t + half; ++k) {
      if (k >= 0 && k < n && track[static_cast<std::size_t>(k)]) ++ones;
    }
    out[static_cast<std::size_t>(t)] = ones >= need ? 1 : 0;
  }
  return out;
}

// Each maximal run of ones [i .. j] becomes an event spanning
// [i / rate, (j + 1) / rate): frame i starts at its left edge and frame j
// ends at its right edge.
inline std::vector<Event> segments_to_events(const std::vector<uint8_t>& track,
                                             int class_id, double frame_rate_hz) {
  if (!(frame_rate_hz > 0.0))
    throw std::invalid_argument("segments_to_events: non-positive frame rate");
  std::vector<Event> out;
  const int n = static_cast<int>(track.size());
  int t = 0;
  while (t < n) {
    if (!track[static_cast<std::size_t>(t)]) {
      ++t;
      continue;
    }
    int j = t;
    while (j + 1 < n && track[static_cast<std::size_t>(j + 1)]) ++j;
    out.push_back(Event{class_id, t / frame_rate_hz, (j + 1) / frame_rate_hz});
    t = j + 1;
  }
  return out;
}

// Events are ordered by class, then onset (runs are found left to right).
inline std::vector<Event> decode(const FrameGrid& grid, const DecodeParams& params) {
  check_decode_params(params);
  std::vector<Event> out;
  const auto tracks = binarize(grid, params.binarize_thresh);
  for (int c = 0; c < grid.num_classes; ++c) {
    const auto smooth = median_filter(tracks[static_cast<std::size_t>(c)], params.median_size);
    auto events = segments_to_events(smooth, c, params.frame_rate_hz);
    out.insert(out.end(), events.begin(), events.end());
  }
  return out;
}

}  // namespace sedlab
