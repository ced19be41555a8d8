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

#include "gsp/poisson.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "test_instances.hpp"

namespace gsp {
namespace {

class NoOpSwap : public SwapProcedure {
 public:
  SwapDecision propose(double, const Base& a, Rng&) override {
    return {a.first(), a.first()};
  }
  ContractTag contract_tag() const override { return {}; }
  std::optional<std::vector<std::pair<double, SwapDecision>>>
  enumerate_outcomes(double, const Base& a) override {
    return std::vector<std::pair<double, SwapDecision>>{
        {1.0, {a.first(), a.first()}}};
  }
};

TEST(NextEventTime, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(next_event_time(0.7, 3, 1.0), 0.7);
  EXPECT_NEAR(next_event_time(0.5, 2, 0.25), 1.0, 1e-12);
  EXPECT_NEAR(next_event_time(0.1, 1, 0.01), 10.0, 1e-12);
  EXPECT_THROW(next_event_time(0.5, 2, 0.0), std::invalid_argument);
}

TEST(SampleNextEvent, NeverBeforeCurrentTime) {
  PoissonClock clock{0.2, 3, 0.2};
  Rng rng(9, kClockStream);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_GT(sample_next_event(clock, rng), clock.t);
  }
}

TEST(SampleNextEvent, EmpiricalLawMatchesInverseCdf) {
  const double t = 0.3;
  const int k = 4;
  const int n = 100000;
  PoissonClock clock{t, k, t};
  Rng rng(123, kClockStream);
  std::vector<double> draws(n);
  for (double& d : draws) d = sample_next_event(clock, rng);
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    double cdf = 1.0 - std::pow(t / draws[i], k);
    ks = std::max(ks, std::abs((i + 1.0) / n - cdf));
    ks = std::max(ks, std::abs(static_cast<double>(i) / n - cdf));
  }
  EXPECT_LT(ks, 0.02);
}

TEST(RunGsPoisson, EpsilonOneMeansZeroEvents) {
  CoverageFunction f = cov3w();
  PartitionMatroid m = cov3_partition();
  NoOpSwap swap;
  RunReport r = run_gs_poisson(m, f, swap, 1.0, 77);
  EXPECT_EQ(r.swap_events, 0);
  Rng init(77, kInitStream);
  EXPECT_EQ(r.final_base, uniform_random_base(m, init));
}

TEST(RunGsPoisson, MeanEventCountMatchesRate) {
  // Expected swap calls: k * ln(1/eps) with k = 3, eps = 0.05 -> 8.987.
  UniformMatroid m(3, 3);
  ModularFunction f({1.0, 1.0, 1.0});
  NoOpSwap swap;
  const int kRuns = 2000;
  double total = 0.0;
  for (int i = 0; i < kRuns; ++i) {
    total += run_gs_poisson(m, f, swap, 0.05, 1000 + i).swap_events;
  }
  double mean = total / kRuns;
  double expected = 3.0 * std::log(1.0 / 0.05);
  EXPECT_NEAR(mean, expected, 0.05 * expected);
}

TEST(RunGsPoisson, SameSeedIsBitReproducible) {
  CoverageFunction f = cov3w();
  PartitionMatroid m = cov3_partition();
  FullBaseSwap swap(f, m, GradientMode::exact());
  RunReport a = run_gs_poisson(m, f, swap, 0.05, 4242);
  RunReport b = run_gs_poisson(m, f, swap, 0.05, 4242);
  EXPECT_EQ(a.final_base, b.final_base);
  EXPECT_EQ(a.final_value, b.final_value);
  EXPECT_EQ(a.swap_events, b.swap_events);
  EXPECT_EQ(a.value_queries, b.value_queries);
  EXPECT_EQ(a.extension_queries, b.extension_queries);
}

TEST(RunGsPoisson, RejectsInfeasibleSwaps) {
  class BrokenSwap : public SwapProcedure {
   public:
    SwapDecision propose(double, const Base& a, Rng&) override {
      return {a.first(), a.first() == 0 ? 2 : 0};  // same-part move breaks it
    }
    ContractTag contract_tag() const override { return {}; }
  };
  // Moving 0 -> 2 within part {0,2} keeps a base; moving 1 -> 0 does not.
  PartitionMatroid m({{1}, {0, 2}}, {1, 1});
  ModularFunction f({1.0, 1.0, 1.0});
  BrokenSwap swap;
  EXPECT_THROW(run_gs_poisson(m, f, swap, 0.05, 5), std::runtime_error);
}

TEST(RunGsPoisson, Cov3wWithExactSwapHitsAverageBound) {
  CoverageFunction f = cov3w();
  PartitionMatroid m = cov3_partition();
  FullBaseSwap swap(f, m, GradientMode::exact());
  const double eps = 0.05;
  const int kRuns = 2000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < kRuns; ++i) {
    double v = run_gs_poisson(m, f, swap, eps, 9000 + i).final_value;
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / kRuns;
  double var = (sumsq - kRuns * mean * mean) / (kRuns - 1);
  double se = std::sqrt(std::max(0.0, var) / kRuns);
  double bound = (1.0 - eps) * (1.0 - std::exp(-1.0)) * 3.0;
  EXPECT_GE(mean, bound - 3.0 * se);
}

TEST(FullBaseSwap, Cov3wDecisionDistribution) {
  CoverageFunction f = cov3w();
  PartitionMatroid m = cov3_partition();
  FullBaseSwap swap(f, m, GradientMode::exact());
  // Gradients at t=0.5, A={0,1} are (1, 2, 1.5): target base {2,1},
  // h(0)=2, h(1)=1, so the decision is (0,2) or (1,1) with probability 1/2.
  auto outcomes = swap.enumerate_outcomes(0.5, Base{0, 1});
  ASSERT_TRUE(outcomes.has_value());
  ASSERT_EQ(outcomes->size(), 2u);
  EXPECT_DOUBLE_EQ((*outcomes)[0].first, 0.5);
  EXPECT_EQ((*outcomes)[0].second.out, 0);
  EXPECT_EQ((*outcomes)[0].second.in, 2);
  EXPECT_EQ((*outcomes)[1].second.out, 1);
  EXPECT_EQ((*outcomes)[1].second.in, 1);

  Rng rng(8, kSwapStream);
  int moved = 0;
  for (int i = 0; i < 4000; ++i) {
    SwapDecision d = swap.propose(0.5, Base{0, 1}, rng);
    if (d.out == 0) {
      EXPECT_EQ(d.in, 2);
      ++moved;
    } else {
      EXPECT_EQ(d.out, 1);
      EXPECT_EQ(d.in, 1);
    }
  }
  EXPECT_NEAR(moved, 2000, 130);  // 3 sigma is ~95
}

TEST(FullBaseSwap, UniqueBaseGivesIdentity) {
  PartitionMatroid m({{0}, {1}}, {1, 1});
  ModularFunction f({1.0, 2.0});
  Rng rng(3, kSwapStream);
  SwapDecision d = full_base_swap(0.4, Base{0, 1}, f, m, GradientMode::exact(),
                                  rng);
  EXPECT_EQ(d.out, d.in);
}

TEST(FullBaseSwap, ModularConvergesToMaxWeightBase) {
  ModularFunction f({1.0, 5.0, 2.0, 8.0});
  PartitionMatroid m({{0, 1}, {2, 3}}, {1, 1});
  FullBaseSwap swap(f, m, GradientMode::exact());
  RunReport r = run_gs_poisson(m, f, swap, 0.005, 31337);
  EXPECT_EQ(r.final_base, (Base{1, 3}));
  EXPECT_DOUBLE_EQ(r.final_value, 13.0);
}

TEST(FullBaseSwap, SampledModeCarriesNoContract) {
  CoverageFunction f = cov3w();
  PartitionMatroid m = cov3_partition();
  FullBaseSwap swap(f, m, GradientMode::sampled(16));
  EXPECT_FALSE(swap.contract_tag().above_average);
  EXPECT_FALSE(swap.enumerate_outcomes(0.5, Base{0, 1}).has_value());
  Rng rng(11, kSwapStream);
  SwapDecision d = swap.propose(0.5, Base{0, 1}, rng);
  EXPECT_TRUE(m.is_base(Base({0, 1}).without(d.out).with(d.in)));
}

}  // namespace
}  // namespace gsp
