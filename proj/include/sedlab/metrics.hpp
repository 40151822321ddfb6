// sedlab/metrics.hpp

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

// Evaluation stack: collar-based event F1 (macro and micro), intersection
// based F1, and the polyphonic sound detection score (PSDS) in its two
// standard scenario parameterizations.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sedlab/core.hpp"

namespace sedlab {

// One evaluation clip: ground-truth references next to decoded hypotheses.
struct EvalPair {
  std::string clip_id;
  double duration_s = 0.0;
  std::vector<Event> reference;
  std::vector<Event> hypothesis;
};

struct F1Report {
  // Indexed by class id; sized to the largest class id seen.
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<long> tp;
  std::vector<long> fp;
  std::vector<long> fn;
  double macro_f1 = 0.0;  // mean F1 over classes present in the references
  double micro_f1 = 0.0;  // F1 of counts pooled over all classes

  int num_classes() const { return static_cast<int>(f1.size()); }
};

struct PsdsParams {
  double dtc_threshold = 0.7;
  double gtc_threshold = 0.7;
  double cttc_threshold = 0.3;
  double alpha_ct = 0.0;
  double alpha_st = 1.0;
  double e_max = 100.0;  // false positives per hour
  std::vector<double> operating_points = psds_operating_points();
};

inline PsdsParams psds1_params() {
  PsdsParams p;
  p.dtc_threshold = 0.7;
  p.gtc_threshold = 0.7;
  p.alpha_ct = 0.0;
  p.alpha_st = 1.0;
  return p;
}

inline PsdsParams psds2_params() {
  PsdsParams p;
  p.dtc_threshold = 0.1;
  p.gtc_threshold = 0.1;
  p.cttc_threshold = 0.3;
  p.alpha_ct = 0.5;
  p.alpha_st = 1.0;
  return p;
}

inline void check_psds_params(const PsdsParams& p) {
  auto in_unit = [](double x) { return x > 0.0 && x <= 1.0; };
  if (!in_unit(p.dtc_threshold) || !in_unit(p.gtc_threshold) || !in_unit(p.cttc_threshold))
    throw std::invalid_argument("psds: tolerance thresholds must lie in (0, 1]");
  if (p.alpha_ct < 0.0 || p.alpha_st < 0.0)
    throw std::invalid_argument("psds: alpha weights must be >= 0");
  if (!(p.e_max > 0.0)) throw std::invalid_argument("psds: e_max must be > 0");
  if (p.operating_points.empty())
    throw std::invalid_argument("psds: need at least one operating point");
  for (std::size_t i = 0; i < p.operating_points.size(); ++i) {
    const double v = p.operating_points[i];
    if (!(v > 0.0 && v < 1.0))
      throw std::invalid_argument("psds: operating points must lie in (0, 1)");
    if (i > 0 && !(v > p.operating_points[i - 1]))
      throw std::invalid_argument("psds: operating points must be strictly increasing");
  }
}

namespace detail {

using Interval = std::pair<double, double>;

inline std::vector<Interval> merge_intervals(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  return out;
}

// Total length of [a, b] covered by the merged interval set.
inline double covered_length(const std::vector<Interval>& merged, double a, double b) {
  double sum = 0.0;
  for (const auto& iv : merged) {
    const double lo = std::max(a, iv.first);
    const double hi = std::min(b, iv.second);
    if (hi > lo) sum += hi - lo;
  }
  return sum;
}

inline int highest_class(const std::vector<EvalPair>& pairs) {
  int top = -1;
  for (const auto& p : pairs) {
    for (const auto& e : p.reference) top = std::max(top, e.class_id);
    for (const auto& e : p.hypothesis) top = std::max(top, e.class_id);
  }
  return top;
}

inline std::vector<Event> events_of_class(const std::vector<Event>& events, int c) {
  std::vector<Event> out;
  for (const auto& e : events)
    if (e.class_id == c) out.push_back(e);
  return out;
}

inline std::vector<Interval> merged_class_intervals(const std::vector<Event>& events, int c) {
  std::vector<Interval> v;
  for (const auto& e : events)
    if (e.class_id == c) v.emplace_back(e.onset_s, e.offset_s);
  return merge_intervals(std::move(v));
}

inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

inline void finish_report(F1Report* r, const std::vector<bool>& in_refs) {
  const std::size_t k = r->tp.size();
  r->precision.assign(k, 0.0);
  r->recall.assign(k, 0.0);
  r->f1.assign(k, 0.0);
  long tp_all = 0, fp_all = 0, fn_all = 0;
  double f1_sum = 0.0;
  long ref_classes = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double p = safe_ratio(static_cast<double>(r->tp[c]),
                                static_cast<double>(r->tp[c] + r->fp[c]));
    const double rr = safe_ratio(static_cast<double>(r->tp[c]),
                                 static_cast<double>(r->tp[c] + r->fn[c]));
    r->precision[c] = p;
    r->recall[c] = rr;
    r->f1[c] = (p + rr > 0.0) ? 2.0 * p * rr / (p + rr) : 0.0;
    tp_all += r->tp[c];
    fp_all += r->fp[c];
    fn_all += r->fn[c];
    if (in_refs[c]) {
      f1_sum += r->f1[c];
      ++ref_classes;
    }
  }
  r->macro_f1 = ref_classes > 0 ? f1_sum / ref_classes : 0.0;
  const double p = safe_ratio(static_cast<double>(tp_all),
                              static_cast<double>(tp_all + fp_all));
  const double rr = safe_ratio(static_cast<double>(tp_all),
                               static_cast<double>(tp_all + fn_all));
  r->micro_f1 = (p + rr > 0.0) ? 2.0 * p * rr / (p + rr) : 0.0;
}

}  // namespace detail

// Collar-based event matching. A hypothesis matches a reference of the same
// class when |onset difference| <= onset_collar_s and |offset difference| <=
// max(offset_collar_s, offset_collar_frac * reference duration). Matching is
// one-to-one and greedy in onset order on both sides.
inline F1Report event_f1(const std::vector<EvalPair>& pairs, double onset_collar_s,
                         double offset_collar_s, double offset_collar_frac) {
  if (!(onset_collar_s > 0.0) || !(offset_collar_s > 0.0) || !(offset_collar_frac > 0.0))
    throw std::invalid_argument("event_f1: collars must be > 0");
  const int top = detail::highest_class(pairs);
  F1Report rep;
  rep.tp.assign(static_cast<std::size_t>(top + 1), 0);
  rep.fp.assign(static_cast<std::size_t>(top + 1), 0);
  rep.fn.assign(static_cast<std::size_t>(top + 1), 0);
  std::vector<bool> in_refs(static_cast<std::size_t>(top + 1), false);

  auto by_onset = [](const Event& a, const Event& b) {
    return a.onset_s != b.onset_s ? a.onset_s < b.onset_s : a.offset_s < b.offset_s;
  };
  for (const auto& pair : pairs) {
    for (int c = 0; c <= top; ++c) {
      auto refs = detail::events_of_class(pair.reference, c);
      auto hyps = detail::events_of_class(pair.hypothesis, c);
      if (!refs.empty()) in_refs[static_cast<std::size_t>(c)] = true;
      if (refs.empty() && hyps.empty()) continue;
      std::sort(refs.begin(), refs.end(), by_onset);
      std::sort(hyps.begin(), hyps.end(), by_onset);
      std::vector<bool> ref_used(refs.size(), false);
      long matched = 0;
      for (const auto& h : hyps) {
        for (std::size_t i = 0; i < refs.size(); ++i) {
          if (ref_used[i]) continue;
          const Event& r = refs[i];
          const double off_collar =
              std::max(offset_collar_s, offset_collar_frac * (r.offset_s - r.onset_s));
          if (std::abs(h.onset_s - r.onset_s) <= onset_collar_s &&
              std::abs(h.offset_s - r.offset_s) <= off_collar) {
            ref_used[i] = true;
            ++matched;
            break;
          }
        }
      }
      rep.tp[static_cast<std::size_t>(c)] += matched;
      rep.fp[static_cast<std::size_t>(c)] += static_cast<long>(hyps.size()) - matched;
      rep.fn[static_cast<std::size_t>(c)] += static_cast<long>(refs.size()) - matched;
    }
  }
  detail::finish_report(&rep, in_refs);
  return rep;
}

// Intersection-based counting. A hypothesis is valid when the fraction of its
// own duration covered by same-class references reaches dtc; invalid ones are
// false positives. A reference counts as detected when the fraction of its
// duration covered by valid hypotheses reaches gtc.
inline F1Report intersection_f1(const std::vector<EvalPair>& pairs, double dtc,
                                double gtc) {
  if (!(dtc > 0.0 && dtc <= 1.0) || !(gtc > 0.0 && gtc <= 1.0))
    throw std::invalid_argument("intersection_f1: dtc and gtc must lie in (0, 1]");
  const int top = detail::highest_class(pairs);
  F1Report rep;
  rep.tp.assign(static_cast<std::size_t>(top + 1), 0);
  rep.fp.assign(static_cast<std::size_t>(top + 1), 0);
  rep.fn.assign(static_cast<std::size_t>(top + 1), 0);
  std::vector<bool> in_refs(static_cast<std::size_t>(top + 1), false);

  for (const auto& pair : pairs) {
    for (int c = 0; c <= top; ++c) {
      const auto refs = detail::events_of_class(pair.reference, c);
      const auto hyps = detail::events_of_class(pair.hypothesis, c);
      if (!refs.empty()) in_refs[static_cast<std::size_t>(c)] = true;
      if (refs.empty() && hyps.empty()) continue;
      const auto ref_union = detail::merged_class_intervals(pair.reference, c);
      std::vector<detail::Interval> valid;
      for (const auto& h : hyps) {
        const double dur = h.offset_s - h.onset_s;
        const double frac =
            detail::safe_ratio(detail::covered_length(ref_union, h.onset_s, h.offset_s), dur);
        if (frac >= dtc)
          valid.emplace_back(h.onset_s, h.offset_s);
        else
          ++rep.fp[static_cast<std::size_t>(c)];
      }
      const auto valid_union = detail::merge_intervals(std::move(valid));
      for (const auto& r : refs) {
        const double dur = r.offset_s - r.onset_s;
        const double frac =
            detail::safe_ratio(detail::covered_length(valid_union, r.onset_s, r.offset_s), dur);
        if (frac >= gtc)
          ++rep.tp[static_cast<std::size_t>(c)];
        else
          ++rep.fn[static_cast<std::size_t>(c)];
      }
    }
  }
  detail::finish_report(&rep, in_refs);
  return rep;
}

namespace detail {

// One (effective FPR, TPR) sample of a class ROC at one operating point.
struct RocPoint {
  double efpr = 0.0;
  double tpr = 0.0;
};

// Step-function evaluation of max TPR over points with efpr <= e. points must
// be sorted by efpr with tpr replaced by its running max.
inline double roc_value(const std::vector<RocPoint>& points, double e) {
  double best = 0.0;
  for (const auto& p : points) {
    if (p.efpr > e) break;
    best = p.tpr;
  }
  return best;
}

}  // namespace detail

// Area under the effective-TPR vs effective-FPR curve, normalized to [0,1].
// per_op_pairs maps each operating point (binarization threshold) to the
// evaluation pairs decoded at that point; references must be identical across
// operating points. Classes without reference events are excluded from the
// mean/deviation and reported through `warnings`.
inline double psds(const std::map<double, std::vector<EvalPair>>& per_op_pairs,
                   const PsdsParams& params, double total_duration_s, int class_count,
                   std::vector<std::string>* warnings = nullptr) {
  check_psds_params(params);
  if (per_op_pairs.empty()) throw std::invalid_argument("psds: no operating points");
  if (!(total_duration_s > 0.0))
    throw std::invalid_argument("psds: total_duration_s must be > 0");
  if (class_count < 1) throw std::invalid_argument("psds: class_count must be >= 1");

  const auto& ref_pairs = per_op_pairs.begin()->second;
  std::vector<long> ref_count(static_cast<std::size_t>(class_count), 0);
  std::vector<double> ref_hours(static_cast<std::size_t>(class_count), 0.0);
  for (const auto& pair : ref_pairs) {
    for (const auto& e : pair.reference) {
      if (e.class_id < 0 || e.class_id >= class_count)
        throw std::invalid_argument("psds: reference class out of range");
      ref_count[static_cast<std::size_t>(e.class_id)] += 1;
      ref_hours[static_cast<std::size_t>(e.class_id)] += (e.offset_s - e.onset_s) / 3600.0;
    }
  }
  std::vector<int> included;
  for (int c = 0; c < class_count; ++c) {
    if (ref_count[static_cast<std::size_t>(c)] > 0) {
      included.push_back(c);
    } else if (warnings != nullptr) {
      warnings->push_back("class " + std::to_string(c) +
                          " has no reference events; excluded from PSDS averaging");
    }
  }
  if (included.empty()) {
    if (warnings != nullptr)
      warnings->push_back("no class has reference events; PSDS reported as 0");
    return 0.0;
  }

  const double total_hours = total_duration_s / 3600.0;
  std::vector<std::vector<detail::RocPoint>> curves(static_cast<std::size_t>(class_count));
  for (int c : included)
    curves[static_cast<std::size_t>(c)].push_back({0.0, 0.0});  // ROC anchor

  for (const auto& [op, pairs] : per_op_pairs) {
    (void)op;
    std::vector<long> tp(static_cast<std::size_t>(class_count), 0);
    std::vector<long> fp(static_cast<std::size_t>(class_count), 0);
    std::vector<std::vector<long>> ct(
        static_cast<std::size_t>(class_count),
        std::vector<long>(static_cast<std::size_t>(class_count), 0));
    for (const auto& pair : pairs) {
      std::vector<std::vector<detail::Interval>> ref_union(
          static_cast<std::size_t>(class_count));
      for (int c = 0; c < class_count; ++c)
        ref_union[static_cast<std::size_t>(c)] =
            detail::merged_class_intervals(pair.reference, c);
      for (int c : included) {
        std::vector<detail::Interval> valid;
        for (const auto& h : pair.hypothesis) {
          if (h.class_id != c) continue;
          const double dur = h.offset_s - h.onset_s;
          const double frac = detail::safe_ratio(
              detail::covered_length(ref_union[static_cast<std::size_t>(c)], h.onset_s,
                                     h.offset_s),
              dur);
          if (frac >= params.dtc_threshold) {
            valid.emplace_back(h.onset_s, h.offset_s);
            continue;
          }
          ++fp[static_cast<std::size_t>(c)];
          if (params.alpha_ct > 0.0) {
            for (int k : included) {
              if (k == c) continue;
              const double ct_frac = detail::safe_ratio(
                  detail::covered_length(ref_union[static_cast<std::size_t>(k)], h.onset_s,
                                         h.offset_s),
                  dur);
              if (ct_frac >= params.cttc_threshold)
                ++ct[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
            }
          }
        }
        const auto valid_union = detail::merge_intervals(std::move(valid));
        for (const auto& r : pair.reference) {
          if (r.class_id != c) continue;
          const double dur = r.offset_s - r.onset_s;
          const double frac = detail::safe_ratio(
              detail::covered_length(valid_union, r.onset_s, r.offset_s), dur);
          if (frac >= params.gtc_threshold) ++tp[static_cast<std::size_t>(c)];
        }
      }
    }
    for (int c : included) {
      double efpr = static_cast<double>(fp[static_cast<std::size_t>(c)]) / total_hours;
      if (params.alpha_ct > 0.0) {
        double ct_rate_sum = 0.0;
        long others = 0;
        for (int k : included) {
          if (k == c || !(ref_hours[static_cast<std::size_t>(k)] > 0.0)) continue;
          ct_rate_sum +=
              static_cast<double>(ct[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)]) /
              ref_hours[static_cast<std::size_t>(k)];
          ++others;
        }
        if (others > 0) efpr += params.alpha_ct * ct_rate_sum / static_cast<double>(others);
      }
      const double tpr = static_cast<double>(tp[static_cast<std::size_t>(c)]) /
                         static_cast<double>(ref_count[static_cast<std::size_t>(c)]);
      curves[static_cast<std::size_t>(c)].push_back({efpr, tpr});
    }
  }

  std::vector<double> breakpoints{0.0};
  for (int c : included) {
    auto& points = curves[static_cast<std::size_t>(c)];
    std::sort(points.begin(), points.end(),
              [](const detail::RocPoint& a, const detail::RocPoint& b) {
                return a.efpr != b.efpr ? a.efpr < b.efpr : a.tpr < b.tpr;
              });
    double run = 0.0;
    for (auto& p : points) {
      run = std::max(run, p.tpr);
      p.tpr = run;
      if (p.efpr <= params.e_max) breakpoints.push_back(p.efpr);
    }
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  // Effective TPR at each breakpoint, then monotone upper envelope, clamped.
  double area = 0.0;
  double envelope = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double e = breakpoints[i];
    double mean = 0.0;
    for (int c : included) mean += detail::roc_value(curves[static_cast<std::size_t>(c)], e);
    mean /= static_cast<double>(included.size());
    double var = 0.0;
    for (int c : included) {
      const double d = detail::roc_value(curves[static_cast<std::size_t>(c)], e) - mean;
      var += d * d;
    }
    var /= static_cast<double>(included.size());
    const double etpr = mean - params.alpha_st * std::sqrt(var);
    envelope = std::max(envelope, etpr);
    const double value = std::clamp(envelope, 0.0, 1.0);
    const double next = (i + 1 < breakpoints.size()) ? breakpoints[i + 1] : params.e_max;
    if (next > e) area += value * (next - e);
  }
  return area / params.e_max;
}

}  // namespace sedlab
