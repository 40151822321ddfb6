// sedlab/io.hpp

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

// File formats: JSONL datasets and predictions, scene configuration JSON,
// model checkpoints, and the content hashes the run manifests record.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sedlab/core.hpp"
#include "sedlab/nnet.hpp"
#include "sedlab/synthgen.hpp"

namespace sedlab {

using json = nlohmann::ordered_json;

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string file_content_hash(const std::string& path) {
  return hash_hex(fnv1a64(read_file(path)));
}

// Canonical one-line rendering of every training-relevant field; hashed into
// checkpoints and manifests so artifacts are traceable to their config.
inline std::string config_fingerprint(const ExperimentConfig& c) {
  std::ostringstream s;
  s.precision(17);
  s << "thresh=" << c.thresh << ";win_size=" << c.win_size << ";alpha=" << c.alpha
    << ";use_fpsl=" << (c.use_fpsl ? 1 : 0) << ";binarize_thresh=" << c.binarize_thresh
    << ";median_size=" << c.median_size << ";pooling=" << to_string(c.pooling)
    << ";epochs=" << c.epochs << ";batch_size=" << c.batch_size
    << ";learning_rate=" << c.learning_rate << ";adam_beta1=" << c.adam_beta1
    << ";adam_beta2=" << c.adam_beta2 << ";adam_eps=" << c.adam_eps
    << ";ema_momentum=" << c.ema_momentum << ";conv_channels=" << c.conv_channels
    << ";conv_kernel=" << c.conv_kernel << ";frame_rate_hz=" << c.frame_rate_hz;
  return s.str();
}

inline std::string config_hash(const ExperimentConfig& c) {
  return hash_hex(fnv1a64(config_fingerprint(c)));
}

// --- Dataset JSONL --------------------------------------------------------

inline json clip_to_json(const ClipRecord& clip) {
  json j;
  j["clip_id"] = clip.clip_id;
  j["duration_s"] = clip.duration_s;
  j["frame_rate_hz"] = clip.frame_rate_hz;
  json features = json::array();
  for (int f = 0; f < clip.features.rows; ++f) {
    json row = json::array();
    for (int t = 0; t < clip.features.cols; ++t) row.push_back(clip.features.at(f, t));
    features.push_back(std::move(row));
  }
  j["features"] = std::move(features);
  j["weak"] = clip.weak.values;
  json events = json::array();
  for (const Event& e : clip.events)
    events.push_back(json{{"class", e.class_id}, {"onset_s", e.onset_s},
                          {"offset_s", e.offset_s}});
  j["events"] = std::move(events);
  return j;
}

inline ClipRecord clip_from_json(const json& j) {
  ClipRecord clip;
  clip.clip_id = j.at("clip_id").get<std::string>();
  clip.duration_s = j.at("duration_s").get<double>();
  clip.frame_rate_hz = j.at("frame_rate_hz").get<double>();
  const json& features = j.at("features");
  const int rows = static_cast<int>(features.size());
  const int cols = rows > 0 ? static_cast<int>(features.at(0).size()) : 0;
  clip.features = Matrix(rows, cols);
  for (int f = 0; f < rows; ++f) {
    const json& row = features.at(static_cast<std::size_t>(f));
    if (static_cast<int>(row.size()) != cols)
      throw std::runtime_error("clip " + clip.clip_id + ": ragged feature rows");
    for (int t = 0; t < cols; ++t)
      clip.features.at(f, t) = row.at(static_cast<std::size_t>(t)).get<double>();
  }
  clip.weak.values = j.at("weak").get<std::vector<int>>();
  for (const json& e : j.at("events")) {
    clip.events.push_back(Event{e.at("class").get<int>(), e.at("onset_s").get<double>(),
                                e.at("offset_s").get<double>()});
  }
  return clip;
}

inline void save_dataset_jsonl(const std::string& path,
                               const std::vector<ClipRecord>& clips) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const ClipRecord& clip : clips) out << clip_to_json(clip).dump() << "\n";
}

inline std::vector<ClipRecord> load_dataset_jsonl(const std::string& path,
                                                  bool validate = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<ClipRecord> clips;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ClipRecord clip = clip_from_json(json::parse(line));
    if (validate) {
      if (const auto violations = validate_clip(clip); !violations.empty())
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                                 violations.front());
    }
    clips.push_back(std::move(clip));
  }
  return clips;
}

// --- Prediction JSONL -----------------------------------------------------

struct ClipEvents {
  std::string clip_id;
  std::vector<Event> events;
};

inline void save_events_jsonl(const std::string& path,
                              const std::vector<ClipEvents>& preds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const ClipEvents& p : preds) {
    json j;
    j["clip_id"] = p.clip_id;
    json events = json::array();
    for (const Event& e : p.events)
      events.push_back(json{{"class", e.class_id}, {"onset_s", e.onset_s},
                            {"offset_s", e.offset_s}});
    j["events"] = std::move(events);
    out << j.dump() << "\n";
  }
}

inline std::vector<ClipEvents> load_events_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<ClipEvents> preds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    ClipEvents p;
    p.clip_id = j.at("clip_id").get<std::string>();
    for (const json& e : j.at("events"))
      p.events.push_back(Event{e.at("class").get<int>(), e.at("onset_s").get<double>(),
                               e.at("offset_s").get<double>()});
    preds.push_back(std::move(p));
  }
  return preds;
}

struct ClipPosteriors {
  std::string clip_id;
  double frame_rate_hz = 25.0;
  FrameGrid posteriors;
};

inline void save_posteriors_jsonl(const std::string& path,
                                  const std::vector<ClipPosteriors>& preds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const ClipPosteriors& p : preds) {
    json j;
    j["clip_id"] = p.clip_id;
    j["frame_rate_hz"] = p.frame_rate_hz;
    json grid = json::array();
    for (int c = 0; c < p.posteriors.num_classes; ++c) {
      json row = json::array();
      for (int t = 0; t < p.posteriors.num_frames; ++t)
        row.push_back(p.posteriors.at(c, t));
      grid.push_back(std::move(row));
    }
    j["posteriors"] = std::move(grid);
    out << j.dump() << "\n";
  }
}

inline std::vector<ClipPosteriors> load_posteriors_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<ClipPosteriors> preds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    ClipPosteriors p;
    p.clip_id = j.at("clip_id").get<std::string>();
    p.frame_rate_hz = j.at("frame_rate_hz").get<double>();
    const json& grid = j.at("posteriors");
    const int c = static_cast<int>(grid.size());
    const int t = c > 0 ? static_cast<int>(grid.at(0).size()) : 0;
    p.posteriors = FrameGrid::zeros(c, t);
    for (int cc = 0; cc < c; ++cc) {
      const json& row = grid.at(static_cast<std::size_t>(cc));
      if (static_cast<int>(row.size()) != t)
        throw std::runtime_error("clip " + p.clip_id + ": ragged posterior rows");
      for (int tt = 0; tt < t; ++tt)
        p.posteriors.at(cc, tt) = row.at(static_cast<std::size_t>(tt)).get<double>();
    }
    preds.push_back(std::move(p));
  }
  return preds;
}

// --- Scene JSON -----------------------------------------------------------

struct ScenePair {
  SceneConfig train;
  SceneConfig eval;
};

inline json scene_to_json(const SceneConfig& base, int num_train_clips,
                          int num_eval_clips) {
  json j;
  j["name"] = base.name;
  j["seed"] = base.seed;
  j["num_train_clips"] = num_train_clips;
  j["num_eval_clips"] = num_eval_clips;
  j["clip_duration_s"] = base.clip_duration_s;
  j["frame_rate_hz"] = base.frame_rate_hz;
  j["feature_bins"] = base.feature_bins;
  j["noise_std"] = base.noise_std;
  j["squash_gain"] = base.squash_gain;
  json profiles = json::array();
  for (const ClassProfile& p : base.profiles) {
    profiles.push_back(json{{"class_id", p.class_id},
                            {"stationarity", to_string(p.stationarity)},
                            {"min_duration_s", p.min_duration_s},
                            {"max_duration_s", p.max_duration_s},
                            {"min_events", p.min_events},
                            {"max_events", p.max_events},
                            {"template", p.template_bins}});
  }
  j["profiles"] = std::move(profiles);
  return j;
}

inline void save_scene_json(const std::string& path, const SceneConfig& base,
                            int num_train_clips, int num_eval_clips) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << scene_to_json(base, num_train_clips, num_eval_clips).dump(2) << "\n";
}

// The eval split continues the train split's clip indexing under one seed.
inline ScenePair load_scene_json(const std::string& path) {
  const json j = json::parse(read_file(path));
  SceneConfig base;
  base.name = j.at("name").get<std::string>();
  base.seed = j.at("seed").get<std::uint64_t>();
  base.clip_duration_s = j.at("clip_duration_s").get<double>();
  base.frame_rate_hz = j.at("frame_rate_hz").get<double>();
  base.feature_bins = j.at("feature_bins").get<int>();
  base.noise_std = j.at("noise_std").get<double>();
  base.squash_gain = j.value("squash_gain", 1.0);
  for (const json& pj : j.at("profiles")) {
    ClassProfile p;
    p.class_id = pj.at("class_id").get<int>();
    p.stationarity = stationarity_from_string(pj.at("stationarity").get<std::string>());
    p.min_duration_s = pj.at("min_duration_s").get<double>();
    p.max_duration_s = pj.at("max_duration_s").get<double>();
    p.min_events = pj.at("min_events").get<int>();
    p.max_events = pj.at("max_events").get<int>();
    p.template_bins = pj.at("template").get<std::vector<double>>();
    base.profiles.push_back(std::move(p));
  }
  const int num_train = j.at("num_train_clips").get<int>();
  const int num_eval = j.at("num_eval_clips").get<int>();
  ScenePair pair{base, base};
  pair.train.num_clips = num_train;
  pair.train.first_clip_index = 0;
  pair.eval.num_clips = num_eval;
  pair.eval.first_clip_index = num_train;
  return pair;
}

// --- Checkpoints ----------------------------------------------------------

struct Checkpoint {
  std::string config_hash;
  std::uint64_t seed = 0;
  int epoch = 0;
  ModelParams params;
};

inline void save_checkpoint_json(const std::string& path, const ModelParams& params,
                                 const std::string& cfg_hash, std::uint64_t seed,
                                 int epoch) {
  json j;
  j["config_hash"] = cfg_hash;
  j["seed"] = seed;
  j["epoch"] = epoch;
  j["model"] = json{{"num_features", params.config.num_features},
                    {"num_classes", params.config.num_classes},
                    {"conv_channels", params.config.conv_channels},
                    {"conv_kernel", params.config.conv_kernel},
                    {"pooling", to_string(params.config.pooling)}};
  json tensors;
  for (const auto& [name, t] : params.named_tensors()) {
    tensors[name] = json{{"shape", t->shape}, {"data", t->data}};
  }
  j["tensors"] = std::move(tensors);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump() << "\n";
}

inline Checkpoint load_checkpoint_json(const std::string& path) {
  const json j = json::parse(read_file(path));
  Checkpoint ck;
  ck.config_hash = j.at("config_hash").get<std::string>();
  ck.seed = j.at("seed").get<std::uint64_t>();
  ck.epoch = j.at("epoch").get<int>();
  const json& m = j.at("model");
  ModelConfig mc;
  mc.num_features = m.at("num_features").get<int>();
  mc.num_classes = m.at("num_classes").get<int>();
  mc.conv_channels = m.at("conv_channels").get<int>();
  mc.conv_kernel = m.at("conv_kernel").get<int>();
  mc.pooling = pooling_from_string(m.at("pooling").get<std::string>());
  Rng rng(0);
  ck.params = init_model(mc, &rng);
  for (auto& [name, t] : ck.params.named_tensors()) {
    const json& tj = j.at("tensors").at(name);
    const auto shape = tj.at("shape").get<std::vector<int>>();
    const auto data = tj.at("data").get<std::vector<double>>();
    if (shape != t->shape || data.size() != t->size())
      throw std::runtime_error("checkpoint tensor " + name + " has wrong shape");
    t->data = data;
  }
  return ck;
}

}  // namespace sedlab
