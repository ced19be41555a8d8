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

#include "gsp/preprocess.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "gsp/oracle.hpp"
#include "test_instances.hpp"

namespace gsp {
namespace {

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

double se_of(const std::vector<double>& xs) {
  double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / (xs.size() - 1) / xs.size());
}

TEST(CheckpointSet, HandWorkedSets) {
  CheckpointSet one = checkpoint_set(1, 0.25);
  EXPECT_EQ(one.indices, (std::vector<int>{0, 1}));

  CheckpointSet ten = checkpoint_set(10, 0.5 - 1e-12);
  EXPECT_EQ(ten.indices, (std::vector<int>{0, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
}

TEST(CheckpointSet, GapBudgetAtKHundred) {
  CheckpointSet cp = checkpoint_set(100, 0.25);
  long long gap_sum = 0;
  for (int i : cp.indices) gap_sum += 100 - i;
  EXPECT_LE(gap_sum, 4LL * 100 * 4);  // 4k / eps with eps = 1/4
  EXPECT_EQ(cp.indices.front(), 0);
  EXPECT_EQ(cp.indices.back(), 100);
}

TEST(CheckpointSet, RejectsBadArguments) {
  EXPECT_THROW(checkpoint_set(0, 0.25), std::invalid_argument);
  EXPECT_THROW(checkpoint_set(5, 0.0), std::invalid_argument);
  EXPECT_THROW(checkpoint_set(5, 0.5), std::invalid_argument);
}

TEST(CheckpointSet, ExactPropertiesOnSmallGrid) {
  const std::pair<long long, long long> eps_grid[] = {
      {49, 100}, {1, 4}, {1, 10}};
  for (int k = 1; k <= 60; ++k)
    for (auto [num, den] : eps_grid)
      EXPECT_TRUE(verify_checkpoint_properties(k, num, den))
          << "k=" << k << " eps=" << num << "/" << den;
}

TEST(ResidualRandomGreedy, Cov3wFollowsFrozenPath) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  int wide_part_first = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed, kAuxStream);
    GreedyTrace trace = residual_random_greedy(f, pm, 0.25, rng);
    ASSERT_EQ(trace.prefixes.size(), 3u);
    ASSERT_EQ(trace.chosen_parts.size(), 2u);
    EXPECT_NE(trace.chosen_parts[0], trace.chosen_parts[1]);
    EXPECT_DOUBLE_EQ(trace.prefix_values.back(), 3.0);
    EXPECT_TRUE(pm.is_base(trace.prefixes.back()));
    if (trace.chosen_parts[0] == 0) {
      // The two-element part goes first: its best marginal is the wide set.
      ++wide_part_first;
      EXPECT_EQ(trace.prefixes[1], Base({2}));
      EXPECT_EQ(trace.prefixes[2], Base({1, 2}));
    }
  }
  EXPECT_GT(wide_part_first, 0);
  EXPECT_LT(wide_part_first, 20);
}

TEST(ResidualRandomGreedy, SimplePartitionQueryBudget) {
  {
    CoverageFunction f = cov3w();
    PartitionMatroid pm = cov3_partition();
    Rng rng(5, kAuxStream);
    GreedyTrace trace = residual_random_greedy(f, pm, 0.25, rng);
    EXPECT_LE(trace.value_queries, 2 * 3);
  }
  {
    Rng gen(99, kAuxStream);
    auto fp = random_coverage(10, 12, gen);
    PartitionMatroid pm = random_simple_partition(10, 4, gen);
    Rng rng(7, kAuxStream);
    GreedyTrace trace = residual_random_greedy(*fp, pm, 0.1, rng);
    EXPECT_LE(trace.value_queries, 2 * 10);
  }
}

TEST(ResidualRandomGreedy, SubsampledPartsStayCheap) {
  // One part of 8 with capacity 2 and delta = 0.9: each step samples a
  // single candidate, so the whole run costs at most 3 value queries.
  Rng gen(3, kAuxStream);
  auto fp = random_coverage(8, 10, gen);
  PartitionMatroid pm({{0, 1, 2, 3, 4, 5, 6, 7}}, {2});
  Rng rng(11, kAuxStream);
  GreedyTrace trace = residual_random_greedy(*fp, pm, 0.9, rng);
  EXPECT_LE(trace.value_queries, 3);
  EXPECT_TRUE(pm.is_base(trace.prefixes.back()));
}

TEST(ResidualRandomGreedy, QuarterOfOptimumInExpectation) {
  Rng gen(42, kAuxStream);
  auto fp = random_coverage(10, 12, gen);
  PartitionMatroid pm = random_simple_partition(10, 3, gen);
  OptCertificate opt = brute_force_optimum(*fp, pm);

  std::vector<double> finals;
  for (int trial = 0; trial < 400; ++trial) {
    Rng rng(1000 + trial, kAuxStream);
    GreedyTrace trace = residual_random_greedy(*fp, pm, 0.2, rng);
    finals.push_back(trace.prefix_values.back());
  }
  double bound = 0.25 * opt.opt_value - 3.0 * se_of(finals);
  EXPECT_GE(mean_of(finals), bound);
}

TEST(ResidualValueV, Cov3wHandValues) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  EXPECT_DOUBLE_EQ(residual_value_V(f, Base{}, pm), 5.0);
  EXPECT_DOUBLE_EQ(residual_value_V(f, Base({2}), pm), 0.0);

  long long before = f.counters().values();
  EXPECT_DOUBLE_EQ(residual_value_V(f, Base({1, 2}), pm), 0.0);
  EXPECT_EQ(f.counters().values(), before);  // base: no queries at all
}

TEST(ResidualValueV, NonIncreasingAlongGreedyPrefixes) {
  Rng gen(17, kAuxStream);
  auto fp = random_coverage(9, 11, gen);
  PartitionMatroid pm = random_simple_partition(9, 4, gen);
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed, kAuxStream);
    GreedyTrace trace = residual_random_greedy(*fp, pm, 0.2, rng);
    double prev = residual_value_V(*fp, trace.prefixes[0], pm);
    for (size_t i = 1; i < trace.prefixes.size(); ++i) {
      double cur = residual_value_V(*fp, trace.prefixes[i], pm);
      EXPECT_LE(cur, prev + 1e-12);
      prev = cur;
    }
    EXPECT_DOUBLE_EQ(prev, 0.0);
  }
}

TEST(FindThresholdIndex, BinarySearchExamples) {
  const std::vector<double> v = {5.0, 5.0, 2.0, 0.0, 0.0};
  auto at = [&](int i) { return v[i]; };
  EXPECT_EQ(find_threshold_index(at, 4, 3.0, ThresholdMode::kBinaryOverAll)
                .index,
            2);
  EXPECT_EQ(find_threshold_index(at, 4, 5.0, ThresholdMode::kBinaryOverAll)
                .index,
            0);
  EXPECT_EQ(find_threshold_index(at, 4, 0.0, ThresholdMode::kBinaryOverAll)
                .index,
            3);
  EXPECT_THROW(
      find_threshold_index(at, 4, -1.0, ThresholdMode::kBinaryOverAll),
      std::runtime_error);
}

TEST(FindThresholdIndex, CheckpointScanStopsAtFirstHit) {
  const std::vector<double> v = {5.0, 5.0, 2.0, 0.0, 0.0};
  auto at = [&](int i) { return v[i]; };
  CheckpointSet cp;
  cp.indices = {0, 2, 4};

  ThresholdSearch hit =
      find_threshold_index(at, 4, 3.0, ThresholdMode::kCheckpointScan, &cp);
  EXPECT_EQ(hit.index, 2);
  EXPECT_EQ(hit.evaluations, 2);
  EXPECT_DOUBLE_EQ(hit.value_at_index, 2.0);

  // Between checkpoints the scan overshoots the exact cut (3) to the next
  // checkpoint.
  ThresholdSearch coarse =
      find_threshold_index(at, 4, 1.0, ThresholdMode::kCheckpointScan, &cp);
  EXPECT_EQ(coarse.index, 4);
  EXPECT_EQ(find_threshold_index(at, 4, 1.0, ThresholdMode::kBinaryOverAll)
                .index,
            3);
}

TEST(FindThresholdIndex, DetectsNonMonotoneValues) {
  const std::vector<double> v = {5.0, 7.0, 2.0, 0.0};
  auto at = [&](int i) { return v[i]; };
  EXPECT_THROW(
      find_threshold_index(at, 3, 2.0, ThresholdMode::kBinaryOverAll),
      std::runtime_error);
}

TEST(FastPreprocess, RepetitionCountAndTrivialCutOnCov3w) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  Rng rng(123, kAuxStream);
  PreprocessResult prep = fast_preprocess(f, pm, 0.49, rng);
  EXPECT_EQ(prep.reps, 19);  // ceil(log_{7/6}(8 / 0.49))
  EXPECT_DOUBLE_EQ(prep.approx, 3.0);
  // The threshold c * approx is far above V(empty) = 5, so no prefix is
  // committed.
  EXPECT_EQ(prep.prefix_index, 0);
  EXPECT_TRUE(prep.p.empty());
  EXPECT_GT(prep.value_queries, 0);
}

TEST(FastPreprocess, PrefixValueBoundOnRandomCoverage) {
  // E[(1 - 1/e) f(O_P union P) + (1/e) f(P)] >= (1 - 1/e - eps) OPT.
  Rng gen(7, kAuxStream);
  auto fp = random_coverage(12, 16, gen);
  PartitionMatroid pm = random_simple_partition(12, 4, gen);
  OptCertificate opt = brute_force_optimum(*fp, pm);
  const double eps = 0.25;

  std::vector<double> terms;
  for (int trial = 0; trial < 500; ++trial) {
    Rng rng(2000 + trial, kAuxStream);
    PreprocessResult prep = fast_preprocess(*fp, pm, eps, rng);
    double f_prefix = fp->raw_value(prep.p);
    ResidualInstance res = build_residual(*fp, prep.p, pm);
    double residual_opt =
        res.empty() ? 0.0
                    : brute_force_optimum(*res.f_p, *res.matroid).opt_value;
    terms.push_back(f_prefix + (1.0 - 1.0 / std::exp(1.0)) * residual_opt);
  }
  double target = (1.0 - 1.0 / std::exp(1.0) - eps) * opt.opt_value;
  EXPECT_GE(mean_of(terms), target - 3.0 * se_of(terms));
}

TEST(BuildResidual, Cov3wAfterCommittingWideElement) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  ResidualInstance res = build_residual(f, Base({2}), pm);
  ASSERT_FALSE(res.empty());
  EXPECT_EQ(res.f_p->ground_size(), 1);
  EXPECT_EQ(res.matroid->num_parts(), 1);
  EXPECT_EQ(res.matroid->rank(), 1);
  EXPECT_DOUBLE_EQ(res.f_p->fixed_value(), 3.0);
  EXPECT_DOUBLE_EQ(res.f_p->value(Base({0})), 0.0);  // adding e2 gains nothing
  EXPECT_EQ(res.lift(Base({0})), Base({1, 2}));

  long long before = f.counters().values();
  res.f_p->value(Base({0}));
  EXPECT_EQ(f.counters().values(), before + 1);  // shared billing
}

TEST(BuildResidual, EmptyPrefixIsIdentity) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  ResidualInstance res = build_residual(f, Base{}, pm);
  ASSERT_FALSE(res.empty());
  EXPECT_EQ(res.matroid->rank(), pm.rank());
  EXPECT_EQ(res.matroid->num_parts(), pm.num_parts());
  EXPECT_EQ(res.f_p->ground_size(), f.ground_size());
  for (ElementId e = 0; e < 3; ++e)
    EXPECT_DOUBLE_EQ(res.f_p->value(Base({e})),
                     f.value(Base({e})) - f.empty_value());
}

TEST(BuildResidual, FullBaseLeavesNothing) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  Base base({1, 2});
  ResidualInstance res = build_residual(f, base, pm);
  EXPECT_TRUE(res.empty());
  EXPECT_EQ(res.lift(Base{}), base);  // nothing to add: P itself
}

TEST(Pipeline, ExtensionSimpleMeetsApproximationOnCov3w) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  PipelineOptions opts;
  opts.epsilon = 0.05;
  opts.oracle = OracleKind::kExtension;

  std::vector<double> finals;
  for (int trial = 0; trial < 300; ++trial) {
    PipelineReport rep = solve_with_preprocessing(f, pm, opts, 500 + trial);
    EXPECT_EQ(rep.path, "extension-simple");
    EXPECT_TRUE(pm.is_base(rep.final_set));
    EXPECT_GT(rep.extension_queries, 0);
    finals.push_back(rep.final_value);
  }
  double target = (1.0 - 0.05) * (1.0 - 1.0 / std::exp(1.0)) * 3.0;
  EXPECT_GE(mean_of(finals), target - 3.0 * se_of(finals));
}

TEST(Pipeline, ExtensionGeneralizedProjectsToIndependentSet) {
  Rng gen(9, kAuxStream);
  auto fp = random_coverage(5, 6, gen);
  PartitionMatroid pm({{0, 1}, {2, 3, 4}}, {1, 2});
  OptCertificate opt = brute_force_optimum(*fp, pm);
  PipelineOptions opts;
  opts.epsilon = 0.2;
  opts.oracle = OracleKind::kExtension;

  std::vector<double> finals;
  for (int trial = 0; trial < 200; ++trial) {
    PipelineReport rep = solve_with_preprocessing(*fp, pm, opts, 900 + trial);
    EXPECT_EQ(rep.path, "extension-generalized");
    EXPECT_DOUBLE_EQ(rep.delta2, 0.1);
    EXPECT_TRUE(pm.is_independent(rep.final_set));
    EXPECT_LE(rep.final_value, opt.opt_value + 1e-9);
    finals.push_back(rep.final_value);
  }
  double target =
      (1.0 - 0.2) * (1.0 - 1.0 / std::exp(1.0)) * opt.opt_value;
  EXPECT_GE(mean_of(finals), target - 3.0 * se_of(finals));
}

TEST(Pipeline, ValueSimplePathWithDiagnosticDelta) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  PipelineOptions opts;
  opts.epsilon = 0.2;
  opts.oracle = OracleKind::kValue;
  opts.override_delta2 = 0.3;  // keep bandit budgets unit-test sized

  std::vector<double> finals;
  for (int trial = 0; trial < 150; ++trial) {
    PipelineReport rep = solve_with_preprocessing(f, pm, opts, 40 + trial);
    EXPECT_EQ(rep.path, "value-simple");
    EXPECT_DOUBLE_EQ(rep.delta1, 0.2 / 8.0);
    EXPECT_DOUBLE_EQ(rep.delta2, 0.3);
    EXPECT_GT(rep.preprocess_queries, 0);
    EXPECT_GE(rep.value_queries, rep.preprocess_queries);
    EXPECT_EQ(rep.extension_queries, 0);
    EXPECT_TRUE(pm.is_base(rep.final_set));
    finals.push_back(rep.final_value);
  }
  double target = (1.0 - 1.0 / std::exp(1.0) - 0.2) * 3.0;
  EXPECT_GE(mean_of(finals), target - 3.0 * se_of(finals));
}

TEST(Pipeline, ValueGeneralizedPathWithDiagnosticDelta) {
  Rng gen(9, kAuxStream);
  auto fp = random_coverage(5, 6, gen);
  PartitionMatroid pm({{0, 1}, {2, 3, 4}}, {1, 2});
  OptCertificate opt = brute_force_optimum(*fp, pm);
  PipelineOptions opts;
  opts.epsilon = 0.2;
  opts.oracle = OracleKind::kValue;
  opts.override_delta2 = 0.3;  // below 1/e, far above the derived value

  std::vector<double> finals;
  for (int trial = 0; trial < 50; ++trial) {
    PipelineReport rep = solve_with_preprocessing(*fp, pm, opts, 70 + trial);
    EXPECT_EQ(rep.path, "value-generalized");
    EXPECT_TRUE(pm.is_independent(rep.final_set));
    EXPECT_LE(rep.final_value, opt.opt_value + 1e-9);
    finals.push_back(rep.final_value);
  }
  double target = (1.0 - 1.0 / std::exp(1.0) - 0.2) * opt.opt_value;
  EXPECT_GE(mean_of(finals), target - 3.0 * se_of(finals));
}

TEST(Pipeline, ValuePathRefusesLargeEpsilonUnlessForced) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  PipelineOptions opts;
  opts.epsilon = 0.3;
  opts.oracle = OracleKind::kValue;
  EXPECT_THROW(solve_with_preprocessing(f, pm, opts, 1),
               std::invalid_argument);

  opts.force = true;
  opts.override_delta2 = 0.35;
  PipelineReport rep = solve_with_preprocessing(f, pm, opts, 1);
  EXPECT_TRUE(rep.forced);
  EXPECT_LE(rep.final_value, 3.0 + 1e-9);
}

TEST(Pipeline, DeterministicGivenSeed) {
  CoverageFunction f = cov3w();
  PartitionMatroid pm = cov3_partition();
  PipelineOptions opts;
  opts.epsilon = 0.1;
  opts.oracle = OracleKind::kExtension;

  PipelineReport a = solve_with_preprocessing(f, pm, opts, 777);
  PipelineReport b = solve_with_preprocessing(f, pm, opts, 777);
  EXPECT_EQ(a.final_set, b.final_set);
  EXPECT_EQ(a.swap_events, b.swap_events);
  EXPECT_EQ(a.extension_queries, b.extension_queries);
  EXPECT_EQ(a.seed, 777u);
}

}  // namespace
}  // namespace gsp
