// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Residual random greedy, checkpoint machinery, fast preprocessing,
// residual instances, and the composed solver pipelines.

#ifndef GSP_PREPROCESS_HPP_
#define GSP_PREPROCESS_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gsp/matroid.hpp"
#include "gsp/partition_swaps.hpp"
#include "gsp/poisson.hpp"
#include "gsp/random.hpp"
#include "gsp/set_function.hpp"

namespace gsp {

// Prefix trace of one residual-random-greedy run: P_0 through P_rank, plus
// which part supplied each pick.
struct GreedyTrace {
  std::vector<Base> prefixes;
  std::vector<int> chosen_parts;
  std::vector<double> prefix_values;  // f(P_i), from the scan, no requeries
  long long value_queries = 0;
};

// Residual random greedy: extend the prefix rank times, each time drawing a
// part with probability proportional to its remaining capacity, sampling
// min{|U_j \ P|, ceil(|U_j \ P| / capacity * ln(1/delta))} of its unused
// elements, and taking the best sampled marginal (smallest id on ties).
// Simple partitions scan each part exactly once: at most 2n value queries.
inline GreedyTrace residual_random_greedy(const ValueOracle& f,
                                          const PartitionMatroid& pm,
                                          double delta, Rng& rng) {
  GSP_REQUIRE(delta > 0.0 && delta < 1.0,
              "residual_random_greedy: delta must be in (0,1)");
  GSP_REQUIRE(f.ground_size() == pm.ground_size(),
              "residual_random_greedy: ground set mismatch");
  const long long q0 = f.counters().values();
  GreedyTrace trace;
  Base p;
  double fp = f.empty_value();
  trace.prefixes.push_back(p);
  trace.prefix_values.push_back(fp);
  std::vector<int> used(pm.num_parts(), 0);

  for (int i = 1; i <= pm.rank(); ++i) {
    int u = rng.uniform_int(pm.rank() - (i - 1));
    int j = -1;
    for (int q = 0; q < pm.num_parts(); ++q) {
      u -= pm.bound(q) - used[q];
      if (u < 0) {
        j = q;
        break;
      }
    }
    GSP_ASSERT(j >= 0, "residual_random_greedy: capacity accounting broke");

    std::vector<ElementId> avail;
    for (ElementId e : internal::sorted_part(pm, j))
      if (!p.contains(e)) avail.push_back(e);
    const int cap = pm.bound(j) - used[j];
    GSP_ASSERT(cap >= 1 && static_cast<int>(avail.size()) >= cap,
               "residual_random_greedy: part exhausted early");
    const int n_avail = static_cast<int>(avail.size());
    int want = static_cast<int>(std::ceil(
        static_cast<double>(n_avail) / cap * std::log(1.0 / delta)));
    want = std::clamp(want, 1, n_avail);
    if (want < n_avail) {
      for (int s = 0; s < want; ++s) {
        int pick = s + rng.uniform_int(n_avail - s);
        std::swap(avail[s], avail[pick]);
      }
      avail.resize(want);
      std::sort(avail.begin(), avail.end());
    }

    double best_value = -std::numeric_limits<double>::infinity();
    ElementId best = -1;
    for (ElementId e : avail) {
      double v = f.value(p.with(e));
      if (v > best_value) {
        best_value = v;
        best = e;
      }
    }
    p = p.with(best);
    fp = best_value;
    ++used[j];
    trace.prefixes.push_back(p);
    trace.prefix_values.push_back(fp);
    trace.chosen_parts.push_back(j);
  }
  GSP_ASSERT(pm.is_base(p), "residual_random_greedy: final set is not a base");
  trace.value_queries = f.counters().values() - q0;
  return trace;
}

// Residual value V(P): per part, the sum of the largest
// (bound - |P in part|) singleton marginals above P. Parts without residual
// capacity are skipped entirely, which is what keeps checkpoint scans cheap.
inline double residual_value_V(const ValueOracle& f, const Base& p,
                               const PartitionMatroid& pm) {
  GSP_REQUIRE(pm.is_independent(p), "residual_value_V: P must be independent");
  std::vector<int> used(pm.num_parts(), 0);
  p.for_each([&](ElementId e) { ++used[pm.part_of(e)]; });
  bool any = false;
  for (int j = 0; j < pm.num_parts(); ++j)
    if (used[j] < pm.bound(j)) any = true;
  if (!any) return 0.0;

  const double fp = f.value(p);
  double total = 0.0;
  std::vector<double> margs;
  for (int j = 0; j < pm.num_parts(); ++j) {
    const int cap = pm.bound(j) - used[j];
    if (cap <= 0) continue;
    margs.clear();
    for (ElementId e : pm.part(j))
      if (!p.contains(e)) margs.push_back(f.value(p.with(e)) - fp);
    std::sort(margs.rbegin(), margs.rend());
    for (int i = 0; i < cap; ++i) total += margs[i];
  }
  return total;
}

// Checkpoint index set: {ceil(k * (1 - beta^l)) : l >= 0} united with {k},
// beta = 1 - eps/4. With d = 4 it satisfies, exactly:
//   (1) sum_{i in CP} (k - i) <= d * k / eps, and
//   (2) for every i, the harmonic gap sum_{i'=i+1}^{s(i)} 1/(k-i'+1) <= eps,
// where s(i) is the smallest checkpoint >= i.
struct CheckpointSet {
  std::vector<int> indices;
  double beta = 0.0;
};

inline CheckpointSet checkpoint_set(int k, double eps) {
  GSP_REQUIRE(k >= 1, "checkpoint_set: k must be >= 1");
  GSP_REQUIRE(eps > 0.0 && eps < 0.5, "checkpoint_set: eps must be in (0,1/2)");
  CheckpointSet cp;
  cp.beta = 1.0 - eps / 4.0;
  const long double beta = 1.0L - static_cast<long double>(eps) / 4.0L;
  long double pw = 1.0L;
  int idx = 0;
  while (idx < k) {
    idx = static_cast<int>(std::ceil(static_cast<long double>(k) *
                                     (1.0L - pw)));
    idx = std::min(idx, k);
    if (cp.indices.empty() || cp.indices.back() != idx)
      cp.indices.push_back(idx);
    pw *= beta;
  }
  if (cp.indices.back() != k) cp.indices.push_back(k);
  return cp;
}

namespace internal {

// Unsigned big integer, little-endian 64-bit words; just enough arithmetic
// to compare harmonic partial sums against a rational exactly.
class BigUint {
 public:
  BigUint() : w_(1, 0) {}
  explicit BigUint(uint64_t v) : w_(1, v) {}

  void mul_small(uint64_t m) {
    unsigned __int128 carry = 0;
    for (uint64_t& w : w_) {
      unsigned __int128 cur = static_cast<unsigned __int128>(w) * m + carry;
      w = static_cast<uint64_t>(cur);
      carry = cur >> 64;
    }
    while (carry) {
      w_.push_back(static_cast<uint64_t>(carry));
      carry >>= 64;
    }
  }

  void add(const BigUint& o) {
    if (o.w_.size() > w_.size()) w_.resize(o.w_.size(), 0);
    unsigned __int128 carry = 0;
    for (size_t i = 0; i < w_.size(); ++i) {
      unsigned __int128 cur = static_cast<unsigned __int128>(w_[i]) + carry +
                              (i < o.w_.size() ? o.w_[i] : 0);
      w_[i] = static_cast<uint64_t>(cur);
      carry = cur >> 64;
    }
    if (carry) w_.push_back(static_cast<uint64_t>(carry));
  }

  // -1, 0, 1 for <, ==, >
  int cmp(const BigUint& o) const {
    size_t n = std::max(w_.size(), o.w_.size());
    for (size_t i = n; i-- > 0;) {
      uint64_t a = i < w_.size() ? w_[i] : 0;
      uint64_t b = i < o.w_.size() ? o.w_[i] : 0;
      if (a != b) return a < b ? -1 : 1;
    }
    return 0;
  }

 private:
  std::vector<uint64_t> w_;
};

}  // namespace internal

// Exact verification of both checkpoint properties for eps = num/den.
// Property 1 in integers; property 2 by exact fraction accumulation of each
// harmonic gap sum (numerator/denominator as big integers).
inline bool verify_checkpoint_properties(int k, long long eps_num,
                                         long long eps_den) {
  GSP_REQUIRE(k >= 1 && eps_num > 0 && eps_den > 0 && 2 * eps_num < eps_den,
              "verify_checkpoint_properties: need 0 < eps < 1/2");
  const double eps = static_cast<double>(eps_num) / eps_den;
  CheckpointSet cp = checkpoint_set(k, eps);

  // (1) sum (k - i) <= 4k/eps  <=>  eps_num * sum <= 4k * eps_den.
  long long gap_sum = 0;
  for (int i : cp.indices) gap_sum += k - i;
  if (eps_num * gap_sum > 4LL * k * eps_den) return false;

  // (2) per gap (prev, next]: running suffix sums of 1/(k-i), built from
  // i = next-1 down to prev, each compared to eps exactly.
  int prev = -1;
  for (int next : cp.indices) {
    internal::BigUint num(0), den(1);
    for (int i = next - 1; i > prev; --i) {
      // sum += 1/(k - i): num/den -> (num*(k-i) + den) / (den*(k-i))
      const uint64_t m = static_cast<uint64_t>(k - i);
      num.mul_small(m);
      num.add(den);
      den.mul_small(m);
      // compare num/den <= eps_num/eps_den
      internal::BigUint lhs = num, rhs = den;
      lhs.mul_small(static_cast<uint64_t>(eps_den));
      rhs.mul_small(static_cast<uint64_t>(eps_num));
      if (lhs.cmp(rhs) > 0) return false;
    }
    prev = next;
  }
  return true;
}

enum class ThresholdMode { kBinaryOverAll, kCheckpointScan };

struct ThresholdSearch {
  double threshold = 0.0;
  int index = 0;
  double value_at_index = 0.0;
  int evaluations = 0;
};

// First index whose V is at or below the threshold, over a non-increasing
// array V_0..V_r with V_r = 0. Binary mode returns the exact first index;
// checkpoint mode returns the first such checkpoint index.
inline ThresholdSearch find_threshold_index(
    const std::function<double(int)>& v, int r, double threshold,
    ThresholdMode mode, const CheckpointSet* cp = nullptr) {
  GSP_REQUIRE(r >= 0, "find_threshold_index: negative range");
  ThresholdSearch out;
  out.threshold = threshold;
  std::map<int, double> seen;
  auto eval = [&](int i) {
    auto it = seen.find(i);
    if (it != seen.end()) return it->second;
    double val = v(i);
    auto lo = seen.lower_bound(i);
    if (lo != seen.end())
      GSP_CHECK(val >= lo->second - 1e-9 * std::abs(lo->second) - 1e-12,
                "find_threshold_index: V increased between indices");
    if (lo != seen.begin()) {
      auto hi = std::prev(lo);
      GSP_CHECK(hi->second >= val - 1e-9 * std::abs(val) - 1e-12,
                "find_threshold_index: V increased between indices");
    }
    seen.emplace(i, val);
    ++out.evaluations;
    return val;
  };

  if (mode == ThresholdMode::kBinaryOverAll) {
    if (eval(0) <= threshold) {
      out.index = 0;
    } else {
      GSP_CHECK(eval(r) <= threshold,
                "find_threshold_index: no index reaches the threshold");
      int lo = 0, hi = r;  // V[lo] > T, V[hi] <= T
      while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        (eval(mid) <= threshold ? hi : lo) = mid;
      }
      out.index = hi;
    }
  } else {
    GSP_REQUIRE(cp != nullptr,
                "find_threshold_index: checkpoint mode needs checkpoints");
    int found = -1;
    for (int i : cp->indices) {
      if (eval(i) <= threshold) {
        found = i;
        break;
      }
    }
    GSP_CHECK(found >= 0,
              "find_threshold_index: no checkpoint reaches the threshold");
    out.index = found;
  }
  out.value_at_index = seen.at(out.index);
  return out;
}

struct PreprocessResult {
  Base p;
  double approx = 0.0;      // best greedy value across repetitions
  double threshold = 0.0;   // residual-value cutoff used for the prefix cut
  int reps = 0;
  int prefix_index = 0;
  long long value_queries = 0;
};

// Repeated residual random greedy plus a checkpointed prefix cut: the best
// of ceil(log_{7/6}(8/eps)) greedy values estimates the optimum within
// [1/8, 1] with probability 1 - eps, and the returned prefix P of the last
// trace is the first checkpoint whose residual value drops to
// T = (e-1) / ((1-eps) * (1/8)) * approx.
inline PreprocessResult fast_preprocess(const ValueOracle& f,
                                        const PartitionMatroid& pm,
                                        double eps, Rng& rng) {
  GSP_REQUIRE(eps > 0.0 && eps < 0.5, "fast_preprocess: eps must be in (0,1/2)");
  const long long q0 = f.counters().values();
  PreprocessResult out;
  out.reps = static_cast<int>(
      std::ceil(std::log(8.0 / eps) / std::log(7.0 / 6.0)));

  GreedyTrace trace;
  for (int rep = 0; rep < out.reps; ++rep) {
    trace = residual_random_greedy(f, pm, eps, rng);
    out.approx = std::max(out.approx, trace.prefix_values.back());
  }
  for (size_t i = 0; i + 1 < trace.prefix_values.size(); ++i)
    GSP_ASSERT(trace.prefix_values[i] <= trace.prefix_values[i + 1] + 1e-12,
               "fast_preprocess: greedy prefix values must be non-decreasing");

  out.threshold = (std::exp(1.0) - 1.0) / ((1.0 - eps) * (1.0 / 8.0)) *
                  out.approx;
  CheckpointSet cp = checkpoint_set(pm.rank(), eps);
  ThresholdSearch search = find_threshold_index(
      [&](int i) { return residual_value_V(f, trace.prefixes[i], pm); },
      pm.rank(), out.threshold, ThresholdMode::kCheckpointScan, &cp);
  GSP_ASSERT(search.value_at_index <= out.threshold,
             "fast_preprocess: returned prefix misses the threshold cut");
  out.prefix_index = search.index;
  out.p = trace.prefixes[search.index];
  out.value_queries = f.counters().values() - q0;
  return out;
}

// Residual function f_P(S) = f(P union S) - f(P) over the surviving
// elements, remapped to a compact id range. Bills against f's counters.
class ResidualFunction : public ValueOracle {
 public:
  ResidualFunction(const ValueOracle& f, Base fixed,
                   std::vector<ElementId> to_original)
      : ValueOracle(static_cast<int>(to_original.size())),
        f_(&f),
        fixed_(fixed),
        to_original_(std::move(to_original)) {
    adopt_counters(f.counters_ptr());
    fixed_value_ = f.value(fixed_);  // evaluated once, cached
  }

  double fixed_value() const { return fixed_value_; }
  ElementId to_original(ElementId e) const { return to_original_[e]; }

  Base lift(const Base& s) const {
    Base out = fixed_;
    s.for_each([&](ElementId e) { out.insert(to_original_[e]); });
    return out;
  }

 protected:
  double eval(const ElementSet& s) const override {
    return f_->raw_value(lift(s)) - fixed_value_;
  }

 private:
  const ValueOracle* f_;
  Base fixed_;
  std::vector<ElementId> to_original_;
  double fixed_value_ = 0.0;
};

// Matroid restriction after committing P: parts keep only their unused
// elements and bounds drop by |P in part|; exhausted parts disappear.
struct ResidualInstance {
  Base fixed;
  std::shared_ptr<ResidualFunction> f_p;
  std::shared_ptr<PartitionMatroid> matroid;

  bool empty() const { return matroid == nullptr; }
  Base lift(const Base& s) const {
    GSP_REQUIRE(!empty() || s.empty(), "ResidualInstance: nothing to lift");
    return f_p ? f_p->lift(s) : fixed;
  }
};

inline ResidualInstance build_residual(const ValueOracle& f, const Base& p,
                                       const PartitionMatroid& pm) {
  GSP_REQUIRE(pm.is_independent(p), "build_residual: P must be independent");
  ResidualInstance out;
  out.fixed = p;
  std::vector<int> used(pm.num_parts(), 0);
  p.for_each([&](ElementId e) { ++used[pm.part_of(e)]; });

  // Survivors keep their relative order, so an empty prefix maps every id to
  // itself and the residual is the original instance.
  std::vector<ElementId> to_original;
  std::vector<ElementId> to_new(pm.ground_size(), -1);
  for (ElementId e = 0; e < pm.ground_size(); ++e) {
    if (p.contains(e) || used[pm.part_of(e)] >= pm.bound(pm.part_of(e)))
      continue;
    to_new[e] = static_cast<ElementId>(to_original.size());
    to_original.push_back(e);
  }
  std::vector<std::vector<ElementId>> parts;
  std::vector<int> bounds;
  for (int j = 0; j < pm.num_parts(); ++j) {
    if (used[j] >= pm.bound(j)) continue;
    std::vector<ElementId> part;
    for (ElementId e : internal::sorted_part(pm, j))
      if (to_new[e] >= 0) part.push_back(to_new[e]);
    parts.push_back(std::move(part));
    bounds.push_back(pm.bound(j) - used[j]);
  }
  if (parts.empty()) return out;  // P is a base: empty residual
  out.f_p = std::make_shared<ResidualFunction>(f, p, std::move(to_original));
  out.matroid = std::make_shared<PartitionMatroid>(parts, bounds);
  return out;
}

enum class OracleKind { kExtension, kValue };

struct PipelineOptions {
  double epsilon = 0.1;
  OracleKind oracle = OracleKind::kExtension;
  bool force = false;  // run value-oracle paths outside epsilon < 1/4
  // Diagnostic overrides for the derived inner accuracies; NaN keeps the
  // derived values. Intended for tests and cost projection only.
  double override_delta1 = std::numeric_limits<double>::quiet_NaN();
  double override_delta2 = std::numeric_limits<double>::quiet_NaN();
};

struct PipelineReport {
  Base final_set;
  double final_value = 0.0;
  long long swap_events = 0;
  long long value_queries = 0;
  long long extension_queries = 0;
  long long preprocess_queries = 0;
  double approx = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  uint64_t seed = 0;
  double wall_time = 0.0;
  bool forced = false;
  std::string path;
};

// Derived swap-accuracy scale: the preprocessing guarantees a residual
// marginal ratio of at most c * f(O) / f(O_P) with
// c = (e-1) / ((1-delta) * gamma), gamma = 1/8.
inline double preprocess_ratio_constant(double delta) {
  GSP_REQUIRE(delta >= 0.0 && delta < 1.0,
              "preprocess_ratio_constant: delta must be in [0,1)");
  return (std::exp(1.0) - 1.0) / ((1.0 - delta) * (1.0 / 8.0));
}

// Composed solver. Extension-oracle paths run the Poisson swap process
// directly (the exact swap for simple partitions, the lifted-copy swap at
// accuracy eps/2 otherwise). Value-oracle paths first commit the fast
// preprocessing prefix P at accuracy eps/8, then run the bandit swap on the
// residual with accuracy eps/(8c) (simple) or eps/(16c) (generalized), and
// return the union. Value-oracle paths require eps < 1/4 unless forced.
inline PipelineReport solve_with_preprocessing(const ValueOracle& f,
                                               const PartitionMatroid& pm,
                                               const PipelineOptions& opts,
                                               uint64_t seed) {
  GSP_REQUIRE(opts.epsilon > 0.0 && opts.epsilon < 1.0,
              "solve_with_preprocessing: epsilon must be in (0,1)");
  const auto start = std::chrono::steady_clock::now();
  const bool simple = pm.is_simple();
  const bool value_oracle = opts.oracle == OracleKind::kValue;
  const double eps = opts.epsilon;

  PipelineReport rep;
  rep.seed = seed;
  rep.forced = opts.force;
  const long long v0 = f.counters().values();
  const long long e0 = f.counters().extensions();

  auto finish = [&](const Base& final_set) {
    rep.final_set = final_set;
    rep.final_value = f.raw_value(final_set);
    rep.value_queries = f.counters().values() - v0;
    rep.extension_queries = f.counters().extensions() - e0;
    rep.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    return rep;
  };

  if (!value_oracle) {
    if (simple) {
      rep.path = "extension-simple";
      PartitionSwapF swap(f, pm);
      RunReport run = run_gs_poisson(pm, f, swap, eps, seed);
      rep.swap_events = run.swap_events;
      return finish(run.final_base);
    }
    rep.path = "extension-generalized";
    rep.delta2 = eps / 2.0;
    ReducedInstance red = build_reduced_instance(f, pm);
    GeneralizedSwapF swap(red, rep.delta2);
    RunReport run = run_gs_poisson(*red.matroid, *red.g, swap, eps / 2.0,
                                   seed);
    rep.swap_events = run.swap_events;
    Base projected = red.g->project(run.final_base);
    GSP_ASSERT(pm.is_independent(projected),
               "solve_with_preprocessing: projected copy base not "
               "independent");
    return finish(projected);
  }

  if (!opts.force)
    GSP_REQUIRE(eps < 0.25,
                "solve_with_preprocessing: value-oracle paths need epsilon < "
                "1/4 (pass force to run anyway)");

  rep.delta1 = std::isnan(opts.override_delta1) ? eps / 8.0
                                                : opts.override_delta1;
  const double c = preprocess_ratio_constant(rep.delta1);
  rep.delta2 = std::isnan(opts.override_delta2)
                   ? eps / ((simple ? 8.0 : 16.0) * c)
                   : opts.override_delta2;

  Rng prep_rng(seed, kAuxStream);
  PreprocessResult prep = fast_preprocess(f, pm, rep.delta1, prep_rng);
  rep.approx = prep.approx;
  rep.preprocess_queries = prep.value_queries;

  ResidualInstance res = build_residual(f, prep.p, pm);
  if (res.empty()) {
    rep.path = simple ? "value-simple(prefix-only)"
                      : "value-generalized(prefix-only)";
    return finish(prep.p);
  }

  if (simple) {
    rep.path = "value-simple";
    SimpleBanditSwap swap(*res.f_p, *res.matroid, rep.delta2);
    RunReport run =
        run_gs_poisson(*res.matroid, *res.f_p, swap, eps / 2.0, seed);
    rep.swap_events = run.swap_events;
    return finish(res.lift(run.final_base));
  }

  rep.path = "value-generalized";
  ReducedInstance red = build_reduced_instance(*res.f_p, *res.matroid);
  GeneralizedSwapf swap(red, rep.delta2);
  RunReport run =
      run_gs_poisson(*red.matroid, *red.g, swap, eps / 2.0, seed);
  rep.swap_events = run.swap_events;
  Base projected = red.g->project(run.final_base);
  GSP_ASSERT(res.matroid->is_independent(projected),
             "solve_with_preprocessing: projected residual set not "
             "independent");
  return finish(res.lift(projected));
}

}  // namespace gsp

#endif  // GSP_PREPROCESS_HPP_
