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

#ifndef GSP_ELEMENT_SET_HPP_
#define GSP_ELEMENT_SET_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsp {

// Always-on checks. Release builds keep them: every solver invariant in this
// library is cheap relative to the oracle work it guards.
#define GSP_REQUIRE(cond, msg)                            \
  do {                                                    \
    if (!(cond)) throw std::invalid_argument(msg);        \
  } while (0)

#define GSP_CHECK(cond, msg)                              \
  do {                                                    \
    if (!(cond)) throw std::runtime_error(msg);           \
  } while (0)

#define GSP_ASSERT(cond, msg)                             \
  do {                                                    \
    if (!(cond)) throw std::logic_error(msg);             \
  } while (0)

using ElementId = int;

// Fixed-capacity bitset over element ids [0, kMaxGroundSize).
// Copy instances (item, slot) of the reduced universe can push the ground set
// past 64, so four words are kept.
class ElementSet {
 public:
  static constexpr int kWords = 4;
  static constexpr int kMaxGroundSize = kWords * 64;

  constexpr ElementSet() : w_{} {}
  ElementSet(std::initializer_list<ElementId> ids) : w_{} {
    for (ElementId e : ids) insert(e);
  }

  bool contains(ElementId e) const {
    return (w_[word(e)] >> bit(e)) & 1ULL;
  }
  void insert(ElementId e) { w_[word(e)] |= 1ULL << bit(e); }
  void erase(ElementId e) { w_[word(e)] &= ~(1ULL << bit(e)); }

  int size() const {
    int s = 0;
    for (uint64_t w : w_) s += std::popcount(w);
    return s;
  }
  bool empty() const {
    for (uint64_t w : w_) if (w) return false;
    return true;
  }

  ElementSet with(ElementId e) const {
    ElementSet r = *this;
    r.insert(e);
    return r;
  }
  ElementSet without(ElementId e) const {
    ElementSet r = *this;
    r.erase(e);
    return r;
  }

  ElementSet operator|(const ElementSet& o) const {
    ElementSet r;
    for (int i = 0; i < kWords; ++i) r.w_[i] = w_[i] | o.w_[i];
    return r;
  }
  ElementSet operator&(const ElementSet& o) const {
    ElementSet r;
    for (int i = 0; i < kWords; ++i) r.w_[i] = w_[i] & o.w_[i];
    return r;
  }
  // Set difference: elements of *this not in o.
  ElementSet operator-(const ElementSet& o) const {
    ElementSet r;
    for (int i = 0; i < kWords; ++i) r.w_[i] = w_[i] & ~o.w_[i];
    return r;
  }
  bool operator==(const ElementSet& o) const { return w_ == o.w_; }
  bool operator!=(const ElementSet& o) const { return w_ != o.w_; }

  bool is_subset_of(const ElementSet& o) const {
    for (int i = 0; i < kWords; ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }
  bool intersects(const ElementSet& o) const {
    for (int i = 0; i < kWords; ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }

  // Applies fn to each element in increasing id order.
  template <class Fn>
  void for_each(Fn fn) const {
    for (int i = 0; i < kWords; ++i) {
      uint64_t w = w_[i];
      while (w) {
        int b = std::countr_zero(w);
        fn(static_cast<ElementId>(i * 64 + b));
        w &= w - 1;
      }
    }
  }

  std::vector<ElementId> to_vector() const {
    std::vector<ElementId> v;
    v.reserve(size());
    for_each([&](ElementId e) { v.push_back(e); });
    return v;
  }

  // Smallest element, or -1 when empty.
  ElementId first() const {
    for (int i = 0; i < kWords; ++i)
      if (w_[i]) return i * 64 + std::countr_zero(w_[i]);
    return -1;
  }

  uint64_t hash() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (uint64_t w : w_) {
      h ^= w;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::string to_string() const {
    std::string s = "{";
    bool fst = true;
    for_each([&](ElementId e) {
      if (!fst) s += ",";
      s += std::to_string(e);
      fst = false;
    });
    return s + "}";
  }

 private:
  static int word(ElementId e) { return e >> 6; }
  static int bit(ElementId e) { return e & 63; }
  std::array<uint64_t, kWords> w_;
};

struct ElementSetHash {
  size_t operator()(const ElementSet& s) const { return s.hash(); }
};

}  // namespace gsp

#endif  // GSP_ELEMENT_SET_HPP_
