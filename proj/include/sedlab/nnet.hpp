// sedlab/nnet.hpp

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

// Minimal deterministic gradient engine and frame-wise model: two temporal
// convolutions, a learned bidirectional exponential-smoothing layer standing
// in for the usual recurrent block, and per-frame classification + attention
// heads. All backward passes are hand-derived. Training runs single-threaded
// with a fixed reduction order so (seed, config, dataset) fixes every bit.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sedlab/core.hpp"
#include "sedlab/fpsl.hpp"
#include "sedlab/loss.hpp"
#include "sedlab/pooling.hpp"
#include "sedlab/rng.hpp"

namespace sedlab {

struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;
  std::vector<double> grad;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    data.assign(n, 0.0);
    grad.assign(n, 0.0);
  }
  std::size_t size() const { return data.size(); }
};

struct ModelConfig {
  int num_features = 16;
  int num_classes = 6;
  int conv_channels = 16;
  int conv_kernel = 3;  // odd, zero-padded to keep T
  PoolingKind pooling = PoolingKind::attention;
};

inline void check_model_config(const ModelConfig& c) {
  if (c.num_features < 1 || c.num_classes < 1 || c.conv_channels < 1)
    throw std::invalid_argument("model dims must be positive");
  if (c.conv_kernel < 1 || c.conv_kernel % 2 == 0)
    throw std::invalid_argument("conv_kernel must be odd and positive");
}

struct ModelParams {
  ModelConfig config;
  Tensor conv1_w;  // [H, F, K]
  Tensor conv1_b;  // [H]
  Tensor conv2_w;  // [H, H, K]
  Tensor conv2_b;  // [H]
  Tensor smooth_p; // [H] pre-sigmoid smoothing coefficients
  Tensor cls_w;    // [C, H]
  Tensor cls_b;    // [C]
  Tensor att_w;    // [C, H]
  Tensor att_b;    // [C]

  std::vector<std::pair<std::string, Tensor*>> named_tensors() {
    return {{"conv1_w", &conv1_w}, {"conv1_b", &conv1_b}, {"conv2_w", &conv2_w},
            {"conv2_b", &conv2_b}, {"smooth_p", &smooth_p}, {"cls_w", &cls_w},
            {"cls_b", &cls_b},     {"att_w", &att_w},       {"att_b", &att_b}};
  }
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const {
    return {{"conv1_w", &conv1_w}, {"conv1_b", &conv1_b}, {"conv2_w", &conv2_w},
            {"conv2_b", &conv2_b}, {"smooth_p", &smooth_p}, {"cls_w", &cls_w},
            {"cls_b", &cls_b},     {"att_w", &att_w},       {"att_b", &att_b}};
  }
  void zero_grad() {
    for (auto& [name, t] : named_tensors()) {
      (void)name;
      std::fill(t->grad.begin(), t->grad.end(), 0.0);
    }
  }
};

namespace detail {

inline void glorot_fill(Tensor* t, int fan_in, int fan_out, Rng* rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& v : t->data) v = rng->uniform(-a, a);
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

// Weights draw from the seeded stream in declaration order; biases and the
// smoothing coefficients start at zero and consume nothing.
inline ModelParams init_model(const ModelConfig& config, Rng* rng) {
  check_model_config(config);
  const int f = config.num_features;
  const int h = config.conv_channels;
  const int k = config.conv_kernel;
  const int c = config.num_classes;
  ModelParams p;
  p.config = config;
  p.conv1_w = Tensor({h, f, k});
  p.conv1_b = Tensor({h});
  p.conv2_w = Tensor({h, h, k});
  p.conv2_b = Tensor({h});
  p.smooth_p = Tensor({h});
  p.cls_w = Tensor({c, h});
  p.cls_b = Tensor({c});
  p.att_w = Tensor({c, h});
  p.att_b = Tensor({c});
  detail::glorot_fill(&p.conv1_w, f * k, h * k, rng);
  detail::glorot_fill(&p.conv2_w, h * k, h * k, rng);
  detail::glorot_fill(&p.cls_w, h, c, rng);
  detail::glorot_fill(&p.att_w, h, c, rng);
  return p;
}

namespace detail {

// y[o][t] = b[o] + sum_{i,k} w[o][i][k] * x[i][t + k - K/2], zero padded.
inline Matrix conv1d_forward(const Tensor& w, const Tensor& b, const Matrix& x) {
  const int out_ch = w.shape[0];
  const int in_ch = w.shape[1];
  const int kern = w.shape[2];
  const int half = kern / 2;
  const int frames = x.cols;
  if (x.rows != in_ch) throw std::invalid_argument("conv1d: channel mismatch");
  Matrix y(out_ch, frames);
  for (int o = 0; o < out_ch; ++o) {
    for (int t = 0; t < frames; ++t) {
      double acc = b.data[static_cast<std::size_t>(o)];
      for (int i = 0; i < in_ch; ++i) {
        for (int k = 0; k < kern; ++k) {
          const int u = t + k - half;
          if (u < 0 || u >= frames) continue;
          acc += w.data[static_cast<std::size_t>((o * in_ch + i) * kern + k)] * x.at(i, u);
        }
      }
      y.at(o, t) = acc;
    }
  }
  return y;
}

inline void conv1d_backward(const Tensor& w, const Matrix& x, const Matrix& dy,
                            Tensor* w_grad, Tensor* b_grad, Matrix* dx) {
  const int out_ch = w.shape[0];
  const int in_ch = w.shape[1];
  const int kern = w.shape[2];
  const int half = kern / 2;
  const int frames = x.cols;
  for (int o = 0; o < out_ch; ++o) {
    for (int t = 0; t < frames; ++t) {
      const double g = dy.at(o, t);
      b_grad->grad[static_cast<std::size_t>(o)] += g;
      for (int i = 0; i < in_ch; ++i) {
        for (int k = 0; k < kern; ++k) {
          const int u = t + k - half;
          if (u < 0 || u >= frames) continue;
          const auto wi = static_cast<std::size_t>((o * in_ch + i) * kern + k);
          w_grad->grad[wi] += g * x.at(i, u);
          if (dx != nullptr) dx->at(i, u) += g * w.data[wi];
        }
      }
    }
  }
}

}  // namespace detail

// Everything backward needs, alongside the outputs forward promises.
struct ForwardTrace {
  Matrix h1;          // tanh(conv1(x)), H x T
  Matrix h2;          // tanh(conv2(h1)), H x T
  std::vector<double> smooth_a;  // sigmoid(smooth_p), per channel
  Matrix scan_f;      // causal smoothing scan, H x T
  Matrix scan_b;      // anti-causal smoothing scan, H x T
  Matrix smooth;      // 0.5 * (scan_f + scan_b), H x T
  FrameGrid posteriors;  // C x T, sigmoid outputs
  Matrix cls_logits;  // C x T
  Matrix att_logits;  // C x T
  Matrix att_weights; // softmax rows (attention pooling only)
  ClipProbs clip_probs;
};

inline ForwardTrace forward(const ModelParams& params, const Matrix& features) {
  const ModelConfig& cfg = params.config;
  if (features.rows != cfg.num_features)
    throw std::invalid_argument("forward: feature rows do not match model config");
  if (features.cols < 1) throw std::invalid_argument("forward: empty clip");
  const int h = cfg.conv_channels;
  const int c = cfg.num_classes;
  const int frames = features.cols;

  ForwardTrace tr;
  tr.h1 = detail::conv1d_forward(params.conv1_w, params.conv1_b, features);
  for (auto& v : tr.h1.data) v = std::tanh(v);
  tr.h2 = detail::conv1d_forward(params.conv2_w, params.conv2_b, tr.h1);
  for (auto& v : tr.h2.data) v = std::tanh(v);

  tr.smooth_a.resize(static_cast<std::size_t>(h));
  tr.scan_f = Matrix(h, frames);
  tr.scan_b = Matrix(h, frames);
  tr.smooth = Matrix(h, frames);
  for (int ch = 0; ch < h; ++ch) {
    const double a = detail::sigmoid(params.smooth_p.data[static_cast<std::size_t>(ch)]);
    tr.smooth_a[static_cast<std::size_t>(ch)] = a;
    double prev = 0.0;
    for (int t = 0; t < frames; ++t) {
      prev = (1.0 - a) * tr.h2.at(ch, t) + a * prev;
      tr.scan_f.at(ch, t) = prev;
    }
    double next = 0.0;
    for (int t = frames - 1; t >= 0; --t) {
      next = (1.0 - a) * tr.h2.at(ch, t) + a * next;
      tr.scan_b.at(ch, t) = next;
    }
    for (int t = 0; t < frames; ++t)
      tr.smooth.at(ch, t) = 0.5 * (tr.scan_f.at(ch, t) + tr.scan_b.at(ch, t));
  }

  tr.cls_logits = Matrix(c, frames);
  tr.att_logits = Matrix(c, frames);
  tr.posteriors = FrameGrid::zeros(c, frames);
  for (int cc = 0; cc < c; ++cc) {
    for (int t = 0; t < frames; ++t) {
      double zc = params.cls_b.data[static_cast<std::size_t>(cc)];
      double za = params.att_b.data[static_cast<std::size_t>(cc)];
      for (int ch = 0; ch < h; ++ch) {
        const double s = tr.smooth.at(ch, t);
        zc += params.cls_w.data[static_cast<std::size_t>(cc * h + ch)] * s;
        za += params.att_w.data[static_cast<std::size_t>(cc * h + ch)] * s;
      }
      tr.cls_logits.at(cc, t) = zc;
      tr.att_logits.at(cc, t) = za;
      tr.posteriors.at(cc, t) = detail::sigmoid(zc);
    }
  }
  if (cfg.pooling == PoolingKind::attention) {
    tr.att_weights = attention_weights(tr.att_logits);
    tr.clip_probs = pool_attention(tr.posteriors, tr.att_logits);
  } else {
    tr.clip_probs = pool(tr.posteriors, cfg.pooling);
  }
  return tr;
}

// Accumulates parameter gradients for the loss whose derivative w.r.t. the
// frame posteriors is dposteriors and w.r.t. the pooled clip probabilities is
// dclip. Pseudo-label targets enter only through dposteriors and are treated
// as constants.
inline void backward(ModelParams* params, const Matrix& features, const ForwardTrace& tr,
                     const Matrix& dposteriors, const std::vector<double>& dclip) {
  const ModelConfig& cfg = params->config;
  const int h = cfg.conv_channels;
  const int c = cfg.num_classes;
  const int frames = features.cols;

  Matrix dpost = dposteriors;  // C x T, gradient w.r.t. sigmoid outputs
  Matrix datt(c, frames);
  switch (cfg.pooling) {
    case PoolingKind::max: pool_max_backward(tr.posteriors, dclip, &dpost); break;
    case PoolingKind::mean: pool_mean_backward(tr.posteriors, dclip, &dpost); break;
    case PoolingKind::linear_softmax:
      pool_linear_softmax_backward(tr.posteriors, dclip, &dpost);
      break;
    case PoolingKind::attention:
      pool_attention_backward(tr.posteriors, tr.att_weights, dclip, &dpost, &datt);
      break;
  }

  // Heads: through the sigmoid into both linear maps, accumulating dsmooth.
  Matrix dsmooth(h, frames);
  for (int cc = 0; cc < c; ++cc) {
    for (int t = 0; t < frames; ++t) {
      const double p = tr.posteriors.at(cc, t);
      const double dzc = dpost.at(cc, t) * p * (1.0 - p);
      const double dza = datt.at(cc, t);
      params->cls_b.grad[static_cast<std::size_t>(cc)] += dzc;
      params->att_b.grad[static_cast<std::size_t>(cc)] += dza;
      for (int ch = 0; ch < h; ++ch) {
        const double s = tr.smooth.at(ch, t);
        params->cls_w.grad[static_cast<std::size_t>(cc * h + ch)] += dzc * s;
        params->att_w.grad[static_cast<std::size_t>(cc * h + ch)] += dza * s;
        dsmooth.at(ch, t) += dzc * params->cls_w.data[static_cast<std::size_t>(cc * h + ch)] +
                             dza * params->att_w.data[static_cast<std::size_t>(cc * h + ch)];
      }
    }
  }

  // Smoothing layer: reverse both scans; the coefficient gradient collects
  // d f[t] / d a = f[t-1] - x[t] and the mirrored term from the backward scan.
  Matrix dh2(h, frames);
  for (int ch = 0; ch < h; ++ch) {
    const double a = tr.smooth_a[static_cast<std::size_t>(ch)];
    double da = 0.0;
    double carry = 0.0;  // adjoint of scan_f[t] flowing from t+1
    for (int t = frames - 1; t >= 0; --t) {
      const double df = 0.5 * dsmooth.at(ch, t) + a * carry;
      const double prev = t > 0 ? tr.scan_f.at(ch, t - 1) : 0.0;
      da += df * (prev - tr.h2.at(ch, t));
      dh2.at(ch, t) += (1.0 - a) * df;
      carry = df;
    }
    carry = 0.0;  // adjoint of scan_b[t] flowing from t-1
    for (int t = 0; t < frames; ++t) {
      const double db = 0.5 * dsmooth.at(ch, t) + a * carry;
      const double next = t + 1 < frames ? tr.scan_b.at(ch, t + 1) : 0.0;
      da += db * (next - tr.h2.at(ch, t));
      dh2.at(ch, t) += (1.0 - a) * db;
      carry = db;
    }
    params->smooth_p.grad[static_cast<std::size_t>(ch)] += da * a * (1.0 - a);
  }

  for (int ch = 0; ch < h; ++ch)
    for (int t = 0; t < frames; ++t) {
      const double y = tr.h2.at(ch, t);
      dh2.at(ch, t) *= 1.0 - y * y;
    }
  Matrix dh1(h, frames);
  detail::conv1d_backward(params->conv2_w, tr.h1, dh2, &params->conv2_w, &params->conv2_b,
                          &dh1);
  for (int ch = 0; ch < h; ++ch)
    for (int t = 0; t < frames; ++t) {
      const double y = tr.h1.at(ch, t);
      dh1.at(ch, t) *= 1.0 - y * y;
    }
  detail::conv1d_backward(params->conv1_w, features, dh1, &params->conv1_w,
                          &params->conv1_b, nullptr);
}

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long step_count = 0;
};

inline AdamState make_adam_state(const ModelParams& params) {
  AdamState s;
  for (const auto& [name, t] : params.named_tensors()) {
    (void)name;
    s.m.emplace_back(t->size(), 0.0);
    s.v.emplace_back(t->size(), 0.0);
  }
  return s;
}

inline void adam_step(ModelParams* params, AdamState* state, double lr, double beta1,
                      double beta2, double eps) {
  ++state->step_count;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state->step_count));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state->step_count));
  auto tensors = params->named_tensors();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    Tensor* t = tensors[i].second;
    auto& m = state->m[i];
    auto& v = state->v[i];
    for (std::size_t j = 0; j < t->size(); ++j) {
      const double g = t->grad[j];
      m[j] = beta1 * m[j] + (1.0 - beta1) * g;
      v[j] = beta2 * v[j] + (1.0 - beta2) * g * g;
      t->data[j] -= lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + eps);
    }
  }
}

struct TeacherState {
  ModelParams params;
  double momentum = 0.999;
};

inline void ema_update(TeacherState* teacher, const ModelParams& student) {
  auto dst = teacher->params.named_tensors();
  auto src = student.named_tensors();
  const double m = teacher->momentum;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i].second->size() != src[i].second->size())
      throw std::invalid_argument("ema_update: shape mismatch");
    for (std::size_t j = 0; j < dst[i].second->size(); ++j)
      dst[i].second->data[j] = m * dst[i].second->data[j] + (1.0 - m) * src[i].second->data[j];
  }
}

struct TrainLogEntry {
  int epoch = 0;
  double weak_loss = 0.0;
  double fpsl_loss = 0.0;
  double total_loss = 0.0;
};

struct TrainResult {
  ModelParams student;
  TeacherState teacher;
  std::vector<TrainLogEntry> log;
};

// One weakly supervised training run. Per batch: forward every clip, build
// pseudo strong labels from the student's own posteriors (when enabled with a
// positive alpha), accumulate gradients of mean(weak + alpha * frame term),
// apply one Adam step, then advance the EMA teacher. Everything downstream of
// the seed is deterministic.
inline TrainResult train(const std::vector<ClipRecord>& dataset, const ExperimentConfig& cfg,
                         std::uint64_t seed) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  if (const auto violations = validate_config(cfg); !violations.empty())
    throw std::invalid_argument("train: invalid config: " + violations.front());
  const int f = dataset.front().features.rows;
  const int c = static_cast<int>(dataset.front().weak.values.size());
  for (const auto& clip : dataset) {
    if (clip.features.rows != f || static_cast<int>(clip.weak.values.size()) != c)
      throw std::invalid_argument("train: inconsistent dataset shapes");
  }
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

  const bool fpsl_active = cfg.use_fpsl && cfg.alpha > 0.0;
  const FpslParams fpsl_params{cfg.thresh, cfg.win_size};
  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double weak_sum = 0.0;
    double fpsl_sum = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      result.student.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        const ClipRecord& clip = dataset[order[i]];
        const ForwardTrace tr = forward(result.student, clip.features);
        std::vector<double> dclip(static_cast<std::size_t>(c), 0.0);
        weak_loss_backward(tr.clip_probs, clip.weak, &dclip);
        for (auto& g : dclip) g *= inv_batch;
        const double wloss = weak_loss(tr.clip_probs, clip.weak);
        weak_sum += wloss;
        batch_loss += inv_batch * wloss;
        Matrix dpost(c, tr.posteriors.num_frames);
        if (fpsl_active) {
          const PseudoLabelSet pseudo = build_fpsl(tr.posteriors, clip.weak, fpsl_params);
          const double floss = fpsl_loss(tr.posteriors, pseudo);
          fpsl_sum += floss;
          batch_loss += inv_batch * cfg.alpha * floss;
          fpsl_loss_backward(tr.posteriors, pseudo, &dpost);
          for (auto& g : dpost.data) g *= inv_batch * cfg.alpha;
        }
        backward(&result.student, clip.features, tr, dpost, dclip);
      }
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train: non-finite loss (seed=" + std::to_string(seed) +
                                 " epoch=" + std::to_string(epoch) +
                                 " batch=" + std::to_string(start / cfg.batch_size) + ")");
      adam_step(&result.student, &adam, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                cfg.adam_eps);
      ema_update(&result.teacher, result.student);
    }
    TrainLogEntry entry;
    entry.epoch = epoch;
    entry.weak_loss = weak_sum / static_cast<double>(n);
    entry.fpsl_loss = fpsl_sum / static_cast<double>(n);
    entry.total_loss = entry.weak_loss + (fpsl_active ? cfg.alpha * entry.fpsl_loss : 0.0);
    result.log.push_back(entry);
  }
  return result;
}

}  // namespace sedlab
