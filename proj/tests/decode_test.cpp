// sedlab/tests/decode_test.cpp

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

#include "sedlab/decode.hpp"

#include <vector>

#include <gtest/gtest.h>

#include "sedlab/rng.hpp"

namespace sedlab {
namespace {

using Track = std::vector<uint8_t>;

FrameGrid grid_from(const std::vector<std::vector<double>>& rows) {
  FrameGrid g = FrameGrid::zeros(static_cast<int>(rows.size()),
                                 static_cast<int>(rows[0].size()));
  for (int c = 0; c < g.num_classes; ++c)
    for (int t = 0; t < g.num_frames; ++t) g.at(c, t) = rows[c][t];
  return g;
}

TEST(DecodeParams, Validation) {
  DecodeParams p;
  EXPECT_NO_THROW(check_decode_params(p));
  p.median_size = 4;
  EXPECT_THROW(check_decode_params(p), std::invalid_argument);
  p.median_size = 7;
  p.frame_rate_hz = 0.0;
  EXPECT_THROW(check_decode_params(p), std::invalid_argument);
}

TEST(Binarize, InclusiveThreshold) {
  const FrameGrid g = grid_from({{0.4, 0.5, 0.6}});
  const auto tracks = binarize(g, 0.5);
  EXPECT_EQ(tracks[0], (Track{0, 1, 1}));
}

TEST(Binarize, EdgeGrids) {
  const FrameGrid zeros = FrameGrid::zeros(2, 4);
  for (const auto& row : binarize(zeros, 0.5))
    for (uint8_t v : row) EXPECT_EQ(v, 0);
  const FrameGrid pos = grid_from({{0.1, 0.9, 0.2}});
  EXPECT_EQ(binarize(pos, 1e-12)[0], (Track{1, 1, 1}));
}

TEST(MedianFilter, HandTraces) {
  EXPECT_EQ(median_filter({0, 1, 0, 1, 0}, 3), (Track{0, 0, 1, 0, 0}));
  EXPECT_EQ(median_filter({0, 0, 1, 1, 1, 0, 0}, 3), (Track{0, 0, 1, 1, 1, 0, 0}));
  EXPECT_EQ(median_filter({0, 1, 0, 1, 0}, 1), (Track{0, 1, 0, 1, 0}));
}

TEST(MedianFilter, RejectsEvenOrNonPositiveSizes) {
  EXPECT_THROW(median_filter({0, 1}, 2), std::invalid_argument);
  EXPECT_THROW(median_filter({0, 1}, 0), std::invalid_argument);
  EXPECT_THROW(median_filter({0, 1}, -3), std::invalid_argument);
}

TEST(MedianFilter, RunsBelowWindowMajorityDisappear) {
  // A run of two ones can never reach the three-of-five majority.
  EXPECT_EQ(median_filter({1, 1, 0, 0, 0}, 5), (Track{0, 0, 0, 0, 0}));
  EXPECT_EQ(median_filter({0, 0, 1, 1, 0, 0, 0}, 5), (Track{0, 0, 0, 0, 0, 0, 0}));
}

TEST(MedianFilter, FramesBeyondTheClipReadAsZeros) {
  // An all-ones clip shorter than the window majority is wiped out: the
  // virtual frames outside the clip count as zeros, not as a reflection.
  EXPECT_EQ(median_filter({1, 1}, 5), (Track{0, 0}));
  EXPECT_EQ(median_filter({1, 1, 1}, 5), (Track{1, 1, 1}));
}

TEST(MedianFilter, Size7RemovesIsolatedSpike) {
  Track track(31, 0);
  track[15] = 1;
  const Track smoothed = median_filter(track, 7);
  for (uint8_t v : smoothed) EXPECT_EQ(v, 0);
}

TEST(MedianFilter, Size7KeepsLongRuns) {
  Track track(31, 0);
  for (int t = 10; t < 20; ++t) track[static_cast<std::size_t>(t)] = 1;
  const Track smoothed = median_filter(track, 7);
  int ones = 0;
  for (uint8_t v : smoothed) ones += v;
  EXPECT_GE(ones, 7);  // interior survives; the edges may erode
}

// Repeated filtering settles: iterating the filter reaches a fixed point in
// at most T passes. (A single pass is not a fixed point in general — e.g.
// [0,1,0,1,0] under size 3 maps to [0,0,1,0,0] and then to all zeros.)
TEST(MedianFilter, RepeatedApplicationReachesAFixedPoint) {
  Rng rng(1234);
  for (int size : {3, 5, 7}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = rng.uniform_int(1, 40);
      Track track(static_cast<std::size_t>(n));
      for (auto& v : track) v = static_cast<uint8_t>(rng.below(2));
      Track prev = track;
      bool fixed = false;
      for (int iter = 0; iter < n && !fixed; ++iter) {
        Track next = median_filter(prev, size);
        fixed = next == prev;
        prev = std::move(next);
      }
      if (!fixed) fixed = median_filter(prev, size) == prev;
      ASSERT_TRUE(fixed) << "size " << size << " trial " << trial;
    }
  }
}

TEST(SegmentsToEvents, HandTraces) {
  const std::vector<Event> ev = segments_to_events({0, 0, 1, 1, 1, 0}, 0, 25.0);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0], (Event{0, 0.08, 0.2}));

  EXPECT_TRUE(segments_to_events({0, 0, 0}, 1, 25.0).empty());

  const std::vector<Event> full = segments_to_events({1, 1, 1, 1, 1}, 2, 25.0);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0], (Event{2, 0.0, 0.2}));
}

TEST(SegmentsToEvents, RunsAreDisjointSortedAndPositive) {
  Rng rng(88);
  for (int trial = 0; trial < 100; ++trial) {
    Track track(static_cast<std::size_t>(rng.uniform_int(1, 50)));
    for (auto& v : track) v = static_cast<uint8_t>(rng.below(2));
    const std::vector<Event> ev = segments_to_events(track, 3, 25.0);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      ASSERT_LT(ev[i].onset_s, ev[i].offset_s);
      if (i > 0) ASSERT_LT(ev[i - 1].offset_s, ev[i].onset_s);
    }
  }
}

TEST(SegmentsToEvents, RejectsNonPositiveRate) {
  EXPECT_THROW(segments_to_events({1}, 0, 0.0), std::invalid_argument);
}

TEST(Decode, ComposesTheThreeStages) {
  // Class 0 has a clean run; class 1 has an isolated spike that a size-3
  // median filter wipes out.
  const FrameGrid g = grid_from({{0.1, 0.8, 0.9, 0.7, 0.2, 0.1},
                                 {0.1, 0.1, 0.9, 0.1, 0.1, 0.1}});
  DecodeParams p;
  p.binarize_thresh = 0.5;
  p.median_size = 3;
  p.frame_rate_hz = 25.0;
  const std::vector<Event> ev = decode(g, p);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0], (Event{0, 0.04, 0.16}));
}

TEST(Decode, MedianSizeOneKeepsRawRuns) {
  const FrameGrid g = grid_from({{0.9, 0.1, 0.9, 0.9, 0.1}});
  DecodeParams p;
  p.median_size = 1;
  p.frame_rate_hz = 10.0;
  const std::vector<Event> ev = decode(g, p);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0], (Event{0, 0.0, 0.1}));
  EXPECT_EQ(ev[1], (Event{0, 0.2, 0.4}));
}

TEST(Decode, OrderedByClassThenOnset) {
  const FrameGrid g = grid_from({{0.9, 0.0, 0.9, 0.9, 0.0},
                                 {0.9, 0.9, 0.0, 0.0, 0.9}});
  DecodeParams p;
  p.median_size = 1;
  p.frame_rate_hz = 25.0;
  const std::vector<Event> ev = decode(g, p);
  ASSERT_EQ(ev.size(), 4u);
  for (std::size_t i = 1; i < ev.size(); ++i) {
    const bool ordered = ev[i - 1].class_id < ev[i].class_id ||
                         (ev[i - 1].class_id == ev[i].class_id &&
                          ev[i - 1].onset_s < ev[i].onset_s);
    EXPECT_TRUE(ordered);
  }
}

TEST(Decode, RaisingTheThresholdNeverActivatesNewFrames) {
  Rng rng(55);
  FrameGrid g = FrameGrid::zeros(3, 40);
  for (auto& v : g.values) v = rng.uniform();
  const auto lo = binarize(g, 0.3);
  const auto hi = binarize(g, 0.7);
  for (std::size_t c = 0; c < lo.size(); ++c)
    for (std::size_t t = 0; t < lo[c].size(); ++t)
      ASSERT_LE(hi[c][t], lo[c][t]);
}

TEST(Decode, IsolatedSpikeSurvivesSizeOneButNotSizeSeven) {
  FrameGrid g = FrameGrid::zeros(1, 31);
  g.at(0, 15) = 0.99;
  DecodeParams p;
  p.frame_rate_hz = 25.0;
  p.median_size = 1;
  EXPECT_EQ(decode(g, p).size(), 1u);
  p.median_size = 7;
  EXPECT_TRUE(decode(g, p).empty());
}

}  // namespace
}  // namespace sedlab
