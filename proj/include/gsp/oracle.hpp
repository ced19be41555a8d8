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

#ifndef GSP_ORACLE_HPP_
#define GSP_ORACLE_HPP_

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gsp/matroid.hpp"
#include "gsp/multilinear.hpp"
#include "gsp/poisson.hpp"
#include "gsp/set_function.hpp"

namespace gsp {

struct OptCertificate {
  Base opt_set;
  double opt_value = -std::numeric_limits<double>::infinity();
  long long bases_enumerated = 0;
};

namespace internal {

// Applies fn to every base; partition matroids walk per-part combinations,
// general matroids walk rank-sized subsets. Returns number of bases visited.
inline long long for_each_base(const Matroid& m,
                               const std::function<void(const Base&)>& fn) {
  long long count = 0;
  if (const auto* pm = dynamic_cast<const PartitionMatroid*>(&m)) {
    std::vector<std::vector<ElementId>> choices(pm->num_parts());
    std::function<void(int, Base)> rec = [&](int j, Base acc) {
      if (j == pm->num_parts()) {
        ++count;
        fn(acc);
        return;
      }
      const auto& part = pm->part(j);
      const int need = pm->bound(j);
      std::vector<int> idx(need);
      std::function<void(int, int, Base)> comb = [&](int pos, int from,
                                                     Base cur) {
        if (pos == need) {
          rec(j + 1, cur);
          return;
        }
        for (int i = from; i <= static_cast<int>(part.size()) - (need - pos);
             ++i) {
          comb(pos + 1, i + 1, cur.with(part[i]));
        }
      };
      comb(0, 0, acc);
    };
    rec(0, Base{});
    return count;
  }
  GSP_REQUIRE(m.ground_size() <= 16,
              "for_each_base: general ground set too large to enumerate");
  const uint32_t full = 1u << m.ground_size();
  for (uint32_t mask = 0; mask < full; ++mask) {
    if (std::popcount(mask) != m.rank()) continue;
    Base b;
    for (int e = 0; e < m.ground_size(); ++e)
      if (mask & (1u << e)) b.insert(e);
    if (m.is_independent(b)) {
      ++count;
      fn(b);
    }
  }
  return count;
}

inline long long count_bases_estimate(const Matroid& m) {
  if (const auto* pm = dynamic_cast<const PartitionMatroid*>(&m)) {
    double est = 1.0;
    for (int j = 0; j < pm->num_parts(); ++j) {
      double c = 1.0;
      int n = static_cast<int>(pm->part(j).size()), k = pm->bound(j);
      for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
      est *= c;
    }
    return static_cast<long long>(est);
  }
  return m.ground_size() <= 16 ? (1LL << m.ground_size()) : -1;
}

}  // namespace internal

// Exact optimum over all bases; the reference point for every contract and
// approximation check. Uses unbilled evaluations.
inline OptCertificate brute_force_optimum(const ValueOracle& f,
                                          const Matroid& m,
                                          long long base_limit = 1000000) {
  long long est = internal::count_bases_estimate(m);
  GSP_REQUIRE(est >= 0 && est <= base_limit,
              "brute_force_optimum: too many bases to enumerate (estimate " +
                  std::to_string(est) + ")");
  OptCertificate cert;
  cert.bases_enumerated = internal::for_each_base(m, [&](const Base& b) {
    double v = f.raw_value(b);
    if (v > cert.opt_value) {
      cert.opt_value = v;
      cert.opt_set = b;
    }
  });
  GSP_CHECK(cert.bases_enumerated > 0, "brute_force_optimum: no bases");
  return cert;
}

struct VerifyReport {
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string witness;
  long long checks = 0;
};

// Checks sum_{i in T} dF_i(t1_S) >= f(T) - F(t1_S) on random (S, T) pairs
// and t in {0.1, 0.5, 0.9}, with exact evaluation and 1e-9 slack.
inline VerifyReport verify_submodular_standard(const ValueOracle& f,
                                               int trials, Rng& rng) {
  VerifyReport rep;
  const int n = f.ground_size();
  GSP_REQUIRE(n <= 20, "verify_submodular_standard: ground set too large");
  for (int trial = 0; trial < trials; ++trial) {
    for (double t : {0.1, 0.5, 0.9}) {
      ElementSet s, tt;
      for (int e = 0; e < n; ++e) {
        if (rng.bernoulli(0.5)) s.insert(e);
        if (rng.bernoulli(0.5)) tt.insert(e);
      }
      FractionalPoint x = FractionalPoint::scaled_indicator(n, t, s);
      double lhs = 0.0;
      tt.for_each([&](ElementId i) { lhs += exact_gradient(f, x, i); });
      double rhs = f.raw_value(tt) - exact_multilinear(f, x);
      double margin = lhs - rhs;
      ++rep.checks;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.witness = "S=" + s.to_string() + " T=" + tt.to_string() +
                      " t=" + std::to_string(t);
      }
      if (margin < -1e-9) rep.pass = false;
    }
  }
  return rep;
}

// Which expectation inequality to certify. above_average is the special
// case beta = 1, eta = 0 of the approximate contract.
struct SwapContractSpec {
  double beta = 1.0;
  double eta = 0.0;
};

struct SwapVerifyOptions {
  std::vector<double> t_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int trials = 500;        // Monte Carlo proposals per (t, A)
  int max_bases = 256;     // enumerate all bases up to this count, else sample
  int sampled_bases = 32;  // base sample size in the large case
  double exact_slack = 1e-9;
  double se_slack = 3.0;   // Monte Carlo slack in standard errors
  uint64_t seed = 20260814;
  // When the instance has many optimal bases of equal value (e.g. the copy
  // instances built by make_reduced_instance, where every free slot of an
  // item is interchangeable), the contract holds for a well-chosen optimum
  // rather than an arbitrary one. Set this to pick the optimum representative
  // as a function of the current base A; it must return a base of the same
  // value as the brute-force optimum. Unset, the fixed brute-force optimum
  // is used, which is the right check for instances with a rigid optimum.
  std::function<Base(const Base& state)> optimum_for_state;
};

// Certifies E[dF_in - dF_out] >= (beta/k) * sum_{o in O} dF_o
//                                - (1/k) * sum_{a in A} dF_a
//                                - (eta/k) * f(O)
// over a grid of (t, A). Uses the procedure's exact outcome enumeration when
// available (slack 1e-9), otherwise Monte Carlo with se_slack standard
// errors. All gradients are exact.
inline VerifyReport verify_swap_condition(SwapProcedure& swap,
                                          const ValueOracle& f,
                                          const Matroid& m,
                                          const SwapContractSpec& contract,
                                          const SwapVerifyOptions& opts = {}) {
  OptCertificate opt = brute_force_optimum(f, m);
  const int k = m.rank();

  std::vector<Base> bases;
  long long est = internal::count_bases_estimate(m);
  if (est >= 0 && est <= opts.max_bases) {
    internal::for_each_base(m, [&](const Base& b) { bases.push_back(b); });
  } else {
    Rng rng(opts.seed, kInitStream);
    for (int i = 0; i < opts.sampled_bases; ++i)
      bases.push_back(uniform_random_base(m, rng));
  }

  VerifyReport rep;
  Rng mc_rng(opts.seed, kSwapStream);
  for (double t : opts.t_grid) {
    for (const Base& a : bases) {
      ScaledBasePoint p{t, a};
      std::vector<double> grad(m.ground_size());
      for (int e = 0; e < m.ground_size(); ++e)
        grad[e] = gradient_at_scaled_base(f, p, e);

      const Base opt_set =
          opts.optimum_for_state ? opts.optimum_for_state(a) : opt.opt_set;
      double sum_o = 0.0, sum_a = 0.0;
      opt_set.for_each([&](ElementId o) { sum_o += grad[o]; });
      a.for_each([&](ElementId e) { sum_a += grad[e]; });
      const double rhs = contract.beta / k * sum_o - sum_a / k -
                         contract.eta / k * opt.opt_value;

      double lhs, slack;
      auto outcomes = swap.enumerate_outcomes(t, a);
      if (outcomes.has_value()) {
        lhs = 0.0;
        double mass = 0.0;
        for (const auto& [prob, d] : *outcomes) {
          lhs += prob * (grad[d.in] - grad[d.out]);
          mass += prob;
        }
        GSP_CHECK(std::abs(mass - 1.0) < 1e-9,
                  "verify_swap_condition: outcome probabilities do not sum "
                  "to 1");
        slack = opts.exact_slack;
      } else {
        double sum = 0.0, sumsq = 0.0;
        for (int trial = 0; trial < opts.trials; ++trial) {
          SwapDecision d = swap.propose(t, a, mc_rng);
          double g = grad[d.in] - grad[d.out];
          sum += g;
          sumsq += g * g;
        }
        lhs = sum / opts.trials;
        double var =
            std::max(0.0, (sumsq - opts.trials * lhs * lhs) / (opts.trials - 1));
        slack = opts.se_slack * std::sqrt(var / opts.trials) + 1e-12;
      }

      double margin = lhs - rhs + slack;
      ++rep.checks;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.witness = "t=" + std::to_string(t) + " A=" + a.to_string();
      }
      if (margin < 0) rep.pass = false;
    }
  }
  return rep;
}

}  // namespace gsp

#endif  // GSP_ORACLE_HPP_
