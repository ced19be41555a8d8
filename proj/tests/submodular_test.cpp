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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gsp/multilinear.hpp"
#include "gsp/set_function.hpp"
#include "test_instances.hpp"

namespace gsp {
namespace {

ElementSet set_from_mask(int n, uint32_t mask) {
  ElementSet s;
  for (int e = 0; e < n; ++e)
    if (mask & (1u << e)) s.insert(e);
  return s;
}

TEST(ExactMultilinear, EmptyPointGivesEmptyValue) {
  CoverageFunction f = cov3w();
  EXPECT_DOUBLE_EQ(exact_multilinear(f, FractionalPoint(3)), 0.0);
  ModularFunction g({1.0, 2.0}, 0.5);
  EXPECT_DOUBLE_EQ(exact_multilinear(g, FractionalPoint(2)), 0.5);
}

TEST(ExactMultilinear, AgreesWithFOnVertices) {
  CoverageFunction f = cov3w();
  for (uint32_t mask = 0; mask < 8; ++mask) {
    ElementSet s = set_from_mask(3, mask);
    FractionalPoint x = FractionalPoint::scaled_indicator(3, 1.0, s);
    EXPECT_DOUBLE_EQ(exact_multilinear(f, x), f.raw_value(s));
  }
}

TEST(ExactMultilinear, Cov3HalfHalfZeroIsOne) {
  CoverageFunction f = cov3();
  EXPECT_NEAR(exact_multilinear(f, FractionalPoint({0.5, 0.5, 0.0})), 1.0,
              1e-12);
}

TEST(ExactMultilinear, RefusesLargeFractionalSupport) {
  ModularFunction f(std::vector<double>(30, 1.0));
  FractionalPoint x(30);
  for (int i = 0; i < 26; ++i) x.set(i, 0.5);
  EXPECT_THROW(exact_multilinear(f, x), std::invalid_argument);
  // 1-coordinates are fixed, not enumerated, so they never hit the cap.
  FractionalPoint y(30);
  for (int i = 0; i < 30; ++i) y.set(i, 1.0);
  EXPECT_DOUBLE_EQ(exact_multilinear(f, y), 30.0);
}

TEST(GradientAtScaledBase, ModularGradientIsWeight) {
  ModularFunction f({0.7, 1.3, 2.9, 0.1});
  Rng rng(3, kAuxStream);
  for (int rep = 0; rep < 20; ++rep) {
    ScaledBasePoint p{0.05 + 0.9 * rng.uniform01(),
                      set_from_mask(4, 1 + rng.uniform_int(15))};
    int i = rng.uniform_int(4);
    EXPECT_NEAR(gradient_at_scaled_base(f, p, i), (i == 0   ? 0.7
                                                   : i == 1 ? 1.3
                                                   : i == 2 ? 2.9
                                                            : 0.1),
                1e-12);
  }
}

TEST(GradientAtScaledBase, Cov3wFrozenValues) {
  CoverageFunction f = cov3w();
  ScaledBasePoint p{0.5, Base{0, 1}};
  EXPECT_NEAR(gradient_at_scaled_base(f, p, 0), 1.0, 1e-12);
  EXPECT_NEAR(gradient_at_scaled_base(f, p, 1), 2.0, 1e-12);
  EXPECT_NEAR(gradient_at_scaled_base(f, p, 2), 1.5, 1e-12);
}

TEST(GradientMonotonicity, GradientShrinksAsPointGrows) {
  CoverageFunction f = cov3w();
  Rng rng(17, kAuxStream);
  std::unique_ptr<CoverageFunction> g = random_coverage(8, 6, rng);
  for (const ValueOracle* fn :
       {static_cast<const ValueOracle*>(&f),
        static_cast<const ValueOracle*>(g.get())}) {
    const int n = fn->ground_size();
    for (int rep = 0; rep < 50; ++rep) {
      FractionalPoint lo(n), hi(n);
      for (int i = 0; i < n; ++i) {
        double a = rng.uniform01(), b = rng.uniform01();
        lo.set(i, std::min(a, b));
        hi.set(i, std::max(a, b));
      }
      int i = rng.uniform_int(n);
      EXPECT_GE(exact_gradient(*fn, lo, i),
                exact_gradient(*fn, hi, i) - 1e-9);
    }
  }
}

TEST(SampleMarginal, ModularIsDeterministic) {
  ModularFunction f({0.7, 1.3, 2.9});
  Rng rng(5, kSwapStream);
  ScaledBasePoint p{0.3, Base{0, 2}};
  for (int rep = 0; rep < 10; ++rep) {
    EXPECT_NEAR(sample_marginal(f, p, 1, rng), 1.3, 1e-12);
  }
}

TEST(SampleMarginal, AtTimeOneEqualsTrueMarginal) {
  CoverageFunction f = cov3w();
  Rng rng(5, kSwapStream);
  ScaledBasePoint p{1.0, Base{0, 1}};
  for (int rep = 0; rep < 10; ++rep) {
    EXPECT_DOUBLE_EQ(sample_marginal(f, p, 2, rng),
                     f.raw_value(Base{0, 1, 2}) - f.raw_value(Base{0, 1}));
  }
}

TEST(SampleMarginal, UnbiasedForCov3w) {
  CoverageFunction f = cov3w();
  ScaledBasePoint p{0.5, Base{0, 1}};
  Rng rng(2024, kSwapStream);
  const int kSamples = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int s = 0; s < kSamples; ++s) {
    double v = sample_marginal(f, p, 2, rng);
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / kSamples;
  double var = (sumsq - kSamples * mean * mean) / (kSamples - 1);
  double se = std::sqrt(var / kSamples);
  EXPECT_NEAR(mean, 1.5, 3.0 * se + 1e-9);
}

TEST(MarginalsToOptRatio, ModularSimplePartitionIsOne) {
  ModularFunction f({1.0, 4.0, 2.0, 3.0});
  PartitionMatroid m({{0, 1}, {2, 3}}, {1, 1});
  // OPT = 4 + 3; marginal sum of the best base is the same.
  EXPECT_DOUBLE_EQ(marginals_to_opt_ratio(f, m, 7.0), 1.0);
}

TEST(MarginalsToOptRatio, Cov3wIsFiveThirds) {
  CoverageFunction f = cov3w();
  PartitionMatroid m = cov3_partition();
  EXPECT_NEAR(marginals_to_opt_ratio(f, m, 3.0), 5.0 / 3.0, 1e-12);
}

TEST(MarginalsToOptRatio, ConstantFunctionGivesZero) {
  TableFunction f(3, std::vector<double>(8, 2.5));
  PartitionMatroid m = cov3_partition();
  EXPECT_DOUBLE_EQ(marginals_to_opt_ratio(f, m, 2.5), 0.0);
  EXPECT_THROW(marginals_to_opt_ratio(f, m, 0.0), std::invalid_argument);
}

TEST(MarginalsToOptRatio, GeneralizedBoundsTakeTopPerPart) {
  CoverageFunction f = cov3w();
  PartitionMatroid m({{0, 1, 2}}, {2});
  // Top-2 singleton marginals: 3 + 2 = 5; OPT over <=2 picks is 3.
  EXPECT_NEAR(marginals_to_opt_ratio(f, m, 3.0), 5.0 / 3.0, 1e-12);
}

TEST(QueryCounters, BilledExactlyOncePerValueCall) {
  CoverageFunction f = cov3w();
  f.counters().reset();
  f.value(ElementSet{0});
  f.value(ElementSet{0, 1});
  EXPECT_EQ(f.counters().values(), 2);
  f.raw_value(ElementSet{2});
  EXPECT_EQ(f.counters().values(), 2);

  ScaledBasePoint p{0.5, Base{0, 1}};
  Rng rng(1, kSwapStream);
  sample_marginal(f, p, 2, rng);
  EXPECT_EQ(f.counters().values(), 4);

  EXPECT_EQ(f.counters().extensions(), 0);
  exact_multilinear(f, FractionalPoint({0.5, 0.5, 0.0}));
  EXPECT_EQ(f.counters().extensions(), 1);
  EXPECT_EQ(f.counters().values(), 4);  // internal evals are not billed
  gradient_at_scaled_base(f, p, 2);
  EXPECT_EQ(f.counters().extensions(), 3);
}

TEST(QueryCounters, CachesAvoidRecountInflation) {
  CoverageFunction f = cov3w();
  f.counters().reset();
  EXPECT_DOUBLE_EQ(f.empty_value(), 0.0);
  EXPECT_DOUBLE_EQ(f.empty_value(), 0.0);
  EXPECT_EQ(f.counters().values(), 1);
  EXPECT_DOUBLE_EQ(f.singleton_marginal(2), 3.0);
  EXPECT_DOUBLE_EQ(f.singleton_marginal(2), 3.0);
  EXPECT_EQ(f.counters().values(), 2);
}

// Sum of gradient coordinates over T at t1_S dominates f(T) - F(t1_S).
TEST(SubmodularStandardInequality, HoldsOnRandomDraws) {
  CoverageFunction f = cov3w();
  Rng rng(31, kAuxStream);
  std::unique_ptr<CoverageFunction> g = random_coverage(7, 5, rng);
  for (const ValueOracle* fn :
       {static_cast<const ValueOracle*>(&f),
        static_cast<const ValueOracle*>(g.get())}) {
    const int n = fn->ground_size();
    for (double t : {0.1, 0.5, 0.9}) {
      for (int rep = 0; rep < 30; ++rep) {
        ElementSet s = set_from_mask(n, rng.uniform_int(1 << n));
        ElementSet tt = set_from_mask(n, rng.uniform_int(1 << n));
        FractionalPoint x = FractionalPoint::scaled_indicator(n, t, s);
        double lhs = 0.0;
        tt.for_each([&](ElementId i) { lhs += exact_gradient(*fn, x, i); });
        double rhs = fn->raw_value(tt) - exact_multilinear(*fn, x);
        EXPECT_GE(lhs, rhs - 1e-9);
      }
    }
  }
}

}  // namespace
}  // namespace gsp
