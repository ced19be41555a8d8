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

#ifndef GSP_POISSON_HPP_
#define GSP_POISSON_HPP_

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsp/matroid.hpp"
#include "gsp/multilinear.hpp"
#include "gsp/random.hpp"
#include "gsp/set_function.hpp"

namespace gsp {

// Clock of the non-homogeneous Poisson process with rate k/t on [epsilon, 1].
struct PoissonClock {
  double t;
  int k;
  double epsilon;
};

// One proposed exchange: out leaves the base, in enters. out == in is the
// legal no-op.
struct SwapDecision {
  ElementId out;
  ElementId in;
};

// Metadata describing which expectation inequality a procedure promises.
// above_average procedures beat the uniform exchange toward the optimum;
// approximate procedures do so up to factor beta and additive slack
// eta * f(O) / k. eta_note documents instance-dependent eta terms.
struct ContractTag {
  bool above_average = false;
  double beta = 1.0;
  double eta = 0.0;
  std::string eta_note;
};

class SwapProcedure {
 public:
  virtual ~SwapProcedure() = default;
  virtual SwapDecision propose(double t, const Base& a, Rng& rng) = 0;
  virtual ContractTag contract_tag() const = 0;

  // Procedures whose randomness at fixed (t, A) is enumerable (for example a
  // uniform part draw followed by a deterministic argmax) expose the exact
  // outcome distribution here so verifiers can skip Monte Carlo.
  virtual std::optional<std::vector<std::pair<double, SwapDecision>>>
  enumerate_outcomes(double /*t*/, const Base& /*a*/) {
    return std::nullopt;
  }
};

struct RunReport {
  Base final_base;
  double final_value = 0.0;
  long long swap_events = 0;
  long long value_queries = 0;
  long long extension_queries = 0;
  uint64_t seed = 0;
  double wall_time = 0.0;  // seconds; everything else is seed-reproducible
};

// Time of the next event after t for rate k/t, by inverse CDF: the law has
// density k * t^k / r^(k+1) on r >= t, so r = t * u^(-1/k), u ~ Uniform(0,1).
// Values above 1 signal that no further event occurs before the horizon.
inline double next_event_time(double t, int k, double u) {
  GSP_REQUIRE(t > 0.0 && k >= 1 && u > 0.0 && u <= 1.0,
              "next_event_time: need t > 0, k >= 1, u in (0,1]");
  return t * std::pow(u, -1.0 / static_cast<double>(k));
}

inline double sample_next_event(const PoissonClock& clock, Rng& rng) {
  GSP_REQUIRE(clock.epsilon > 0.0 && clock.t >= clock.epsilon && clock.k >= 1,
              "sample_next_event: invalid clock");
  return next_event_time(clock.t, clock.k, rng.uniform01());
}

// The swap process: start from a random base at time epsilon, jump to each
// Poisson event of rate k/t, apply the swap proposed for that instant, stop
// at the horizon t = 1. Expected number of swap calls is k * ln(1/epsilon).
inline RunReport run_gs_poisson(const Matroid& matroid, const ValueOracle& f,
                                SwapProcedure& swap, double epsilon,
                                uint64_t seed) {
  GSP_REQUIRE(epsilon > 0.0 && epsilon <= 1.0,
              "run_gs_poisson: epsilon must be in (0,1]");
  const auto start = std::chrono::steady_clock::now();
  const long long v0 = f.counters().values();
  const long long e0 = f.counters().extensions();

  Rng clock_rng(seed, kClockStream);
  Rng swap_rng(seed, kSwapStream);
  Rng init_rng(seed, kInitStream);

  PoissonClock clock{epsilon, matroid.rank(), epsilon};
  Base a = uniform_random_base(matroid, init_rng);

  RunReport report;
  report.seed = seed;
  while (true) {
    double r = sample_next_event(clock, clock_rng);
    if (r >= 1.0) break;
    clock.t = r;
    SwapDecision d = swap.propose(clock.t, a, swap_rng);
    GSP_CHECK(a.contains(d.out),
              "run_gs_poisson: swap proposed out-element not in base (state " +
                  a.to_string() + ")");
    Base next = a.without(d.out).with(d.in);
    GSP_CHECK(matroid.is_base(next),
              "run_gs_poisson: swap broke base feasibility (state " +
                  a.to_string() + ", out " + std::to_string(d.out) + ", in " +
                  std::to_string(d.in) + ")");
    a = next;
    ++report.swap_events;
  }

  report.final_base = a;
  report.final_value = f.raw_value(a);
  report.value_queries = f.counters().values() - v0;
  report.extension_queries = f.counters().extensions() - e0;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

struct GradientMode {
  enum Kind { kExact, kSampled } kind = kExact;
  int sample_budget = 32;  // per coordinate, sampled mode only

  static GradientMode exact() { return {kExact, 0}; }
  static GradientMode sampled(int budget) { return {kSampled, budget}; }
};

// Swap for arbitrary matroids: compute all gradient coordinates at t * 1_A,
// take the max-weight base Z of those weights, map A onto Z by a base
// exchange map, and swap a uniformly random element of A to its image.
// Exact gradients make this above-average; sampled gradients carry no
// contract and are flagged as heuristic.
inline SwapDecision full_base_swap(double t, const Base& a,
                                   const ValueOracle& f, const Matroid& matroid,
                                   const GradientMode& mode, Rng& rng) {
  std::vector<double> w(matroid.ground_size());
  ScaledBasePoint p{t, a};
  for (int e = 0; e < matroid.ground_size(); ++e) {
    if (mode.kind == GradientMode::kExact) {
      w[e] = gradient_at_scaled_base(f, p, e);
    } else {
      double sum = 0.0;
      for (int s = 0; s < mode.sample_budget; ++s)
        sum += sample_marginal(f, p, e, rng);
      w[e] = sum / mode.sample_budget;
    }
  }
  Base z = greedy_max_weight_base(matroid, w);
  ExchangeMap h = base_exchange_map(matroid, a, z);
  std::vector<ElementId> members = a.to_vector();
  ElementId out = members[rng.uniform_int(static_cast<int>(members.size()))];
  return SwapDecision{out, h.image_of(out)};
}

class FullBaseSwap : public SwapProcedure {
 public:
  FullBaseSwap(const ValueOracle& f, const Matroid& matroid, GradientMode mode)
      : f_(f), matroid_(matroid), mode_(mode) {}

  SwapDecision propose(double t, const Base& a, Rng& rng) override {
    return full_base_swap(t, a, f_, matroid_, mode_, rng);
  }

  ContractTag contract_tag() const override {
    if (mode_.kind == GradientMode::kExact) return ContractTag{true, 1.0, 0.0};
    return ContractTag{false, 0.0, 0.0,
                       "sampled gradients: heuristic, no contract"};
  }

  // The only randomness with exact gradients is the uniform out-element.
  std::optional<std::vector<std::pair<double, SwapDecision>>>
  enumerate_outcomes(double t, const Base& a) override {
    if (mode_.kind != GradientMode::kExact) return std::nullopt;
    std::vector<double> w(matroid_.ground_size());
    ScaledBasePoint p{t, a};
    for (int e = 0; e < matroid_.ground_size(); ++e)
      w[e] = gradient_at_scaled_base(f_, p, e);
    Base z = greedy_max_weight_base(matroid_, w);
    ExchangeMap h = base_exchange_map(matroid_, a, z);
    std::vector<std::pair<double, SwapDecision>> outcomes;
    const double prob = 1.0 / a.size();
    a.for_each([&](ElementId out) {
      outcomes.push_back({prob, SwapDecision{out, h.image_of(out)}});
    });
    return outcomes;
  }

 private:
  const ValueOracle& f_;
  const Matroid& matroid_;
  GradientMode mode_;
};

}  // namespace gsp

#endif  // GSP_POISSON_HPP_
