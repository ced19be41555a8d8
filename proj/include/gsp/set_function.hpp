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

#ifndef GSP_SET_FUNCTION_HPP_
#define GSP_SET_FUNCTION_HPP_

#include <atomic>
#include <memory>
#include <utility>
#include <vector>

#include "gsp/element_set.hpp"

namespace gsp {

// Set-query and extension-query tallies. Solvers report both; the exact
// multilinear extension bills one extension query per evaluation and its
// internal set evaluations are not billed as value queries.
struct QueryCounters {
  std::atomic<long long> value_queries{0};
  std::atomic<long long> extension_queries{0};

  void reset() {
    value_queries.store(0, std::memory_order_relaxed);
    extension_queries.store(0, std::memory_order_relaxed);
  }
  long long values() const {
    return value_queries.load(std::memory_order_relaxed);
  }
  long long extensions() const {
    return extension_queries.load(std::memory_order_relaxed);
  }
};

// Monotone submodular value oracle. value() is the billed query path;
// raw_value() is for reporting and for the exact extension, which has its
// own billing. f(empty) and singleton marginals are cached after first use
// so repeated scans do not inflate the counters.
class ValueOracle {
 public:
  explicit ValueOracle(int ground_size)
      : ground_size_(ground_size),
        counters_(std::make_shared<QueryCounters>()),
        singleton_cache_(ground_size, 0.0),
        singleton_known_(ground_size, 0) {
    GSP_REQUIRE(ground_size >= 1 &&
                    ground_size <= ElementSet::kMaxGroundSize,
                "ValueOracle: bad ground size");
  }
  virtual ~ValueOracle() = default;

  int ground_size() const { return ground_size_; }

  double value(const ElementSet& s) const {
    counters_->value_queries.fetch_add(1, std::memory_order_relaxed);
    return eval(s);
  }
  double raw_value(const ElementSet& s) const { return eval(s); }

  double empty_value() const {
    if (!f0_known_) {
      f0_ = value(ElementSet{});
      f0_known_ = true;
    }
    return f0_;
  }

  // f({e}) - f(empty), cached per element on first touch.
  double singleton_marginal(ElementId e) const {
    GSP_REQUIRE(e >= 0 && e < ground_size_, "singleton_marginal: bad id");
    if (!singleton_known_[e]) {
      singleton_cache_[e] = value(ElementSet{e}) - empty_value();
      singleton_known_[e] = 1;
    }
    return singleton_cache_[e];
  }

  QueryCounters& counters() const { return *counters_; }
  const std::shared_ptr<QueryCounters>& counters_ptr() const {
    return counters_;
  }
  // Wrappers (residual, lifted-copy) bill against their parent's counters.
  void adopt_counters(std::shared_ptr<QueryCounters> c) {
    counters_ = std::move(c);
  }

 protected:
  virtual double eval(const ElementSet& s) const = 0;

 private:
  int ground_size_;
  std::shared_ptr<QueryCounters> counters_;
  mutable double f0_ = 0.0;
  mutable bool f0_known_ = false;
  mutable std::vector<double> singleton_cache_;
  mutable std::vector<char> singleton_known_;
};

// f(S) = total weight of the items covered by the union of covers(e), e in S.
// Monotone and submodular for non-negative item weights.
class CoverageFunction : public ValueOracle {
 public:
  CoverageFunction(std::vector<ElementSet> covers,
                   std::vector<double> item_weights)
      : ValueOracle(static_cast<int>(covers.size())),
        covers_(std::move(covers)),
        item_weights_(std::move(item_weights)) {
    for (double w : item_weights_)
      GSP_REQUIRE(w >= 0.0, "CoverageFunction: negative item weight");
    for (const ElementSet& c : covers_) {
      c.for_each([&](ElementId item) {
        GSP_REQUIRE(item < static_cast<int>(item_weights_.size()),
                    "CoverageFunction: cover references unknown item");
      });
    }
  }

  const ElementSet& covers(ElementId e) const { return covers_[e]; }
  int num_items() const { return static_cast<int>(item_weights_.size()); }
  double item_weight(int i) const { return item_weights_[i]; }

 protected:
  double eval(const ElementSet& s) const override {
    ElementSet covered;
    s.for_each([&](ElementId e) { covered = covered | covers_[e]; });
    double total = 0.0;
    covered.for_each([&](ElementId item) { total += item_weights_[item]; });
    return total;
  }

 private:
  std::vector<ElementSet> covers_;
  std::vector<double> item_weights_;
};

// f(S) = offset + sum of per-element weights.
class ModularFunction : public ValueOracle {
 public:
  explicit ModularFunction(std::vector<double> weights, double offset = 0.0)
      : ValueOracle(static_cast<int>(weights.size())),
        weights_(std::move(weights)),
        offset_(offset) {}

 protected:
  double eval(const ElementSet& s) const override {
    double total = offset_;
    s.for_each([&](ElementId e) { total += weights_[e]; });
    return total;
  }

 private:
  std::vector<double> weights_;
  double offset_;
};

// Explicit table over all 2^n subsets, n <= 20. Test instrument.
class TableFunction : public ValueOracle {
 public:
  TableFunction(int n, std::vector<double> table)
      : ValueOracle(n), table_(std::move(table)) {
    GSP_REQUIRE(n <= 20, "TableFunction: too many elements");
    GSP_REQUIRE(table_.size() == (1u << n), "TableFunction: bad table size");
  }

 protected:
  double eval(const ElementSet& s) const override {
    uint32_t mask = 0;
    s.for_each([&](ElementId e) {
      GSP_REQUIRE(e < ground_size(), "TableFunction: element out of range");
      mask |= 1u << e;
    });
    return table_[mask];
  }

 private:
  std::vector<double> table_;
};

}  // namespace gsp

#endif  // GSP_SET_FUNCTION_HPP_
