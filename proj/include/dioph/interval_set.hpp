#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "dioph/error.hpp"
#include "dioph/rat.hpp"

namespace dioph {

struct ClosedInterval {
  Rat lo, hi;
  friend bool operator==(const ClosedInterval&, const ClosedInterval&) = default;
};

struct OpenInterval {
  Rat lo, hi;
  friend bool operator==(const OpenInterval&, const OpenInterval&) = default;
};

// Sorted, pairwise disjoint closed intervals (degenerate [x, x] allowed).
// On the enclosure path the intervals are an outer approximation and
// `inner()` holds an inner one.
class IntervalSet {
 public:
  IntervalSet() = default;

  explicit IntervalSet(std::vector<ClosedInterval> parts, bool exact = true) : parts_(std::move(parts)), exact_(exact) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i].hi < parts_[i].lo) throw ConsistencyError("interval with lo > hi");
      if (i && !(parts_[i - 1].hi < parts_[i].lo)) throw ConsistencyError("intervals not sorted and disjoint");
    }
  }

  static IntervalSet with_inner(std::vector<ClosedInterval> outer, std::vector<ClosedInterval> inner) {
    IntervalSet s(std::move(outer), false);
    s.inner_ = IntervalSet(std::move(inner), false).parts_;
    return s;
  }

  const std::vector<ClosedInterval>& intervals() const { return parts_; }
  const std::optional<std::vector<ClosedInterval>>& inner() const { return inner_; }
  bool exact() const { return exact_; }
  bool empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }

  bool contains(const Rat& x) const { return contains_in(parts_, x); }

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) {
    return a.exact_ == b.exact_ && a.parts_ == b.parts_ && a.inner_ == b.inner_;
  }

  static bool contains_in(const std::vector<ClosedInterval>& parts, const Rat& x) {
    auto it = std::upper_bound(parts.begin(), parts.end(), x,
                               [](const Rat& v, const ClosedInterval& iv) { return v < iv.lo; });
    if (it == parts.begin()) return false;
    return x <= std::prev(it)->hi;
  }

  static Rat measure_of(const std::vector<ClosedInterval>& parts) {
    std::vector<Rat> lens;
    lens.reserve(parts.size());
    for (const auto& iv : parts) lens.push_back(iv.hi - iv.lo);
    return exact_sum(std::move(lens));
  }

 private:
  std::vector<ClosedInterval> parts_;
  bool exact_ = true;
  std::optional<std::vector<ClosedInterval>> inner_;
};

// [lo, hi] minus the union of open intervals, as closed pieces. Touching
// open intervals leave their shared endpoint as a degenerate piece.
inline std::vector<ClosedInterval> complement_of_union(std::vector<OpenInterval> excluded, const Rat& lo, const Rat& hi) {
  std::sort(excluded.begin(), excluded.end(), [](const OpenInterval& a, const OpenInterval& b) { return a.lo < b.lo; });
  std::vector<ClosedInterval> out;
  if (hi < lo) return out;
  // Everything in [lo, pos) is covered; pos itself is uncovered.
  Rat pos = lo;
  bool done = false;
  for (const auto& e : excluded) {
    if (!(e.lo < e.hi)) continue;
    if (e.hi <= pos) continue;
    if (e.lo < pos) {
      pos = e.hi;
    } else {
      // pos <= e.lo: [pos, e.lo] is uncovered (e is open at e.lo).
      if (hi < e.lo) {
        out.push_back({pos, hi});
        done = true;
        break;
      }
      out.push_back({pos, e.lo});
      pos = e.hi;
    }
    if (hi < pos) {
      done = true;
      break;
    }
  }
  if (!done && pos <= hi) out.push_back({pos, hi});
  return out;
}

// Merged union of open intervals, as (lo, hi) open components.
inline std::vector<OpenInterval> union_of(std::vector<OpenInterval> parts) {
  std::sort(parts.begin(), parts.end(), [](const OpenInterval& a, const OpenInterval& b) { return a.lo < b.lo; });
  std::vector<OpenInterval> out;
  for (const auto& p : parts) {
    if (!(p.lo < p.hi)) continue;
    // Open components sharing only an endpoint stay separate.
    if (!out.empty() && p.lo < out.back().hi) {
      if (out.back().hi < p.hi) out.back().hi = p.hi;
    } else {
      out.push_back(p);
    }
  }
  return out;
}

inline std::vector<ClosedInterval> intersect_window(const std::vector<ClosedInterval>& parts, const Rat& lo, const Rat& hi) {
  std::vector<ClosedInterval> out;
  for (const auto& iv : parts) {
    Rat a = max(iv.lo, lo), b = min(iv.hi, hi);
    if (a <= b) out.push_back({a, b});
  }
  return out;
}

}  // namespace dioph
