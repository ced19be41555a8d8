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

#ifndef GSP_MULTILINEAR_HPP_
#define GSP_MULTILINEAR_HPP_

#include <string>
#include <vector>

#include "gsp/matroid.hpp"
#include "gsp/random.hpp"
#include "gsp/set_function.hpp"

namespace gsp {

// The vector t * 1_A for a base A: the only state the swap process tracks.
struct ScaledBasePoint {
  double t;
  Base a;
};

class FractionalPoint {
 public:
  explicit FractionalPoint(int n) : x_(n, 0.0) {}
  explicit FractionalPoint(std::vector<double> x) : x_(std::move(x)) {
    for (double v : x_)
      GSP_REQUIRE(v >= 0.0 && v <= 1.0,
                  "FractionalPoint: coordinates must lie in [0,1]");
  }
  static FractionalPoint scaled_indicator(int n, double t,
                                          const ElementSet& s) {
    FractionalPoint p(n);
    s.for_each([&](ElementId e) { p.set(e, t); });
    return p;
  }

  int size() const { return static_cast<int>(x_.size()); }
  double operator[](int i) const { return x_[i]; }
  void set(int i, double v) {
    GSP_REQUIRE(v >= 0.0 && v <= 1.0, "FractionalPoint: value out of [0,1]");
    x_[i] = v;
  }

 private:
  std::vector<double> x_;
};

inline constexpr int kDefaultFractionalSupportCap = 25;

// Exact multilinear extension value F(x): enumeration over the fractional
// coordinates only; coordinates at 0 or 1 are fixed. Bills one extension
// query. Refuses fractional supports above the cap.
inline double exact_multilinear(const ValueOracle& f, const FractionalPoint& x,
                                int support_cap = kDefaultFractionalSupportCap) {
  GSP_REQUIRE(x.size() == f.ground_size(),
              "exact_multilinear: dimension mismatch");
  ElementSet fixed;
  std::vector<ElementId> frac;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] == 1.0) {
      fixed.insert(i);
    } else if (x[i] > 0.0) {
      frac.push_back(i);
    }
  }
  GSP_REQUIRE(static_cast<int>(frac.size()) <= support_cap,
              "exact_multilinear: fractional support of size " +
                  std::to_string(frac.size()) + " exceeds cap of " +
                  std::to_string(support_cap));
  f.counters().extension_queries.fetch_add(1, std::memory_order_relaxed);

  const size_t s = frac.size();
  double total = 0.0;
  for (uint64_t mask = 0; mask < (1ULL << s); ++mask) {
    double prob = 1.0;
    ElementSet set = fixed;
    for (size_t b = 0; b < s; ++b) {
      if (mask & (1ULL << b)) {
        prob *= x[frac[b]];
        set.insert(frac[b]);
      } else {
        prob *= 1.0 - x[frac[b]];
      }
    }
    if (prob > 0.0) total += prob * f.raw_value(set);
  }
  return total;
}

// Exact partial derivative of F at x in direction i; F is multilinear, so
// this is F(x with x_i=1) - F(x with x_i=0) and never depends on x_i.
// Bills two extension queries.
inline double exact_gradient(const ValueOracle& f, const FractionalPoint& x,
                             ElementId i,
                             int support_cap = kDefaultFractionalSupportCap) {
  FractionalPoint hi = x, lo = x;
  hi.set(i, 1.0);
  lo.set(i, 0.0);
  return exact_multilinear(f, hi, support_cap) -
         exact_multilinear(f, lo, support_cap);
}

// Exact gradient coordinate of F at the scaled base point t * 1_A.
inline double gradient_at_scaled_base(
    const ValueOracle& f, const ScaledBasePoint& p, ElementId i,
    int support_cap = kDefaultFractionalSupportCap) {
  GSP_REQUIRE(p.t > 0.0 && p.t <= 1.0,
              "gradient_at_scaled_base: t must be in (0,1]");
  FractionalPoint x =
      FractionalPoint::scaled_indicator(f.ground_size(), p.t, p.a);
  return exact_gradient(f, x, i, support_cap);
}

// One unbiased sample of the gradient coordinate at t * 1_A: include each
// a in A independently with probability t, return f(R+i) - f(R-i). Exactly
// two billed value queries.
inline double sample_marginal(const ValueOracle& f, const ScaledBasePoint& p,
                              ElementId i, Rng& rng) {
  ElementSet r;
  p.a.for_each([&](ElementId a) {
    if (rng.bernoulli(p.t)) r.insert(a);
  });
  return f.value(r.with(i)) - f.value(r.without(i));
}

// Max over independent sets of the sum of singleton marginals, divided by
// the optimal value. Partition matroids: per-part sum of the top bound(j)
// marginals. General matroids: matroid greedy (exact for a modular
// objective; marginals are non-negative for monotone f).
inline double marginals_to_opt_ratio(const ValueOracle& f, const Matroid& m,
                                     double opt_value) {
  GSP_REQUIRE(opt_value > 0.0, "marginals_to_opt_ratio: opt_value must be > 0");
  double total = 0.0;
  if (const auto* pm = dynamic_cast<const PartitionMatroid*>(&m)) {
    for (int j = 0; j < pm->num_parts(); ++j) {
      std::vector<double> marg;
      marg.reserve(pm->part(j).size());
      for (ElementId e : pm->part(j)) marg.push_back(f.singleton_marginal(e));
      std::sort(marg.begin(), marg.end(), std::greater<double>());
      for (int s = 0; s < pm->bound(j); ++s) total += marg[s];
    }
  } else {
    std::vector<double> w(m.ground_size());
    for (int e = 0; e < m.ground_size(); ++e) w[e] = f.singleton_marginal(e);
    Base b = greedy_max_weight_base(m, w);
    b.for_each([&](ElementId e) { total += w[e]; });
  }
  return total / opt_value;
}

}  // namespace gsp

#endif  // GSP_MULTILINEAR_HPP_
