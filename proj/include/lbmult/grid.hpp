// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lbmult/error.hpp"
#include "lbmult/lattice.hpp"

namespace lbmult {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Axis-aligned product of closed intervals.
struct Box {
  std::vector<Interval> axes;

  Box() = default;
  explicit Box(std::vector<Interval> a) : axes(std::move(a)) {}

  static Box cube(int d, double lo, double hi) {
    return Box(std::vector<Interval>(static_cast<size_t>(d), Interval{lo, hi}));
  }

  int dim() const { return static_cast<int>(axes.size()); }
  const Interval& operator[](int i) const { return axes[static_cast<size_t>(i)]; }
  Interval& operator[](int i) { return axes[static_cast<size_t>(i)]; }

  bool contains(std::span<const double> x) const {
    for (size_t i = 0; i < axes.size(); ++i)
      if (!axes[i].contains(x[i])) return false;
    return true;
  }

  bool contains(const Box& o) const {
    for (size_t i = 0; i < axes.size(); ++i)
      if (o.axes[i].lo < axes[i].lo || o.axes[i].hi > axes[i].hi) return false;
    return true;
  }

  /// True when the interiors intersect.
  bool overlaps(const Box& o) const {
    for (size_t i = 0; i < axes.size(); ++i)
      if (!(o.axes[i].lo < axes[i].hi && axes[i].lo < o.axes[i].hi)) return false;
    return true;
  }

  Box translated(std::span<const double> s) const {
    Box r = *this;
    for (size_t i = 0; i < axes.size(); ++i) {
      r.axes[i].lo += s[i];
      r.axes[i].hi += s[i];
    }
    return r;
  }

  Box translated(const LatticeIndex& s) const {
    std::vector<double> v(s.coords.begin(), s.coords.end());
    return translated(std::span<const double>(v));
  }

  Box hull(const Box& o) const {
    Box r = *this;
    for (size_t i = 0; i < axes.size(); ++i) {
      r.axes[i].lo = std::min(axes[i].lo, o.axes[i].lo);
      r.axes[i].hi = std::max(axes[i].hi, o.axes[i].hi);
    }
    return r;
  }

  /// Cartesian product (this x o) in R^{d1 + d2}.
  Box product(const Box& o) const {
    Box r = *this;
    r.axes.insert(r.axes.end(), o.axes.begin(), o.axes.end());
    return r;
  }

  /// Smallest box with endpoints in (1/2)Z containing this one.
  Box rounded_to_half_integers() const {
    Box r = *this;
    for (auto& a : r.axes) {
      a.lo = std::floor(2.0 * a.lo + 1e-12) / 2.0;
      a.hi = std::ceil(2.0 * a.hi - 1e-12) / 2.0;
    }
    return r;
  }

  bool operator==(const Box&) const = default;
};

/// Uniform grid with spacing 1/m whose nodes are the lattice points k/m inside a box.
///
/// Nodes along axis a are k/m for lo_index[a] <= k <= hi_index[a]. Storing integer node
/// indices keeps every pair of grids with the same m exactly commensurate. The grid is
/// cube-aligned when m is even: then every cube boundary nu +- 1/2 is a node.
class GridBox {
 public:
  GridBox() = default;

  GridBox(int m, std::vector<std::int64_t> lo_index, std::vector<std::int64_t> hi_index)
      : m_(m), lo_(std::move(lo_index)), hi_(std::move(hi_index)) {
    if (m_ < 2) throw InvalidArgument("GridBox: m must be >= 2 (got " + std::to_string(m_) + ")");
    if (lo_.size() != hi_.size()) throw InvalidArgument("GridBox: lo/hi rank differ");
    if (lo_.empty()) throw InvalidArgument("GridBox: dimension must be >= 1");
    for (size_t a = 0; a < lo_.size(); ++a)
      if (hi_[a] < lo_[a]) throw InvalidArgument("GridBox: empty axis");
    build_strides();
  }

  /// Grid whose box is exactly `box`; every endpoint must be a multiple of 1/m.
  static GridBox exact(const Box& box, int m) {
    std::vector<std::int64_t> lo, hi;
    for (const auto& a : box.axes) {
      lo.push_back(to_node(a.lo, m, "lower"));
      hi.push_back(to_node(a.hi, m, "upper"));
    }
    return GridBox(m, lo, hi);
  }

  /// Smallest grid whose box contains `box`.
  static GridBox covering(const Box& box, int m) {
    std::vector<std::int64_t> lo, hi;
    for (const auto& a : box.axes) {
      lo.push_back(static_cast<std::int64_t>(std::floor(a.lo * m + 1e-9)));
      hi.push_back(static_cast<std::int64_t>(std::ceil(a.hi * m - 1e-9)));
    }
    return GridBox(m, lo, hi);
  }

  int dim() const { return static_cast<int>(lo_.size()); }
  int m() const { return m_; }
  double spacing() const { return 1.0 / m_; }
  bool cube_aligned() const { return m_ % 2 == 0; }

  std::int64_t lo_index(int a) const { return lo_[static_cast<size_t>(a)]; }
  std::int64_t hi_index(int a) const { return hi_[static_cast<size_t>(a)]; }
  const std::vector<std::int64_t>& lo_indices() const { return lo_; }
  const std::vector<std::int64_t>& hi_indices() const { return hi_; }

  /// Number of nodes along axis a.
  std::int64_t count(int a) const { return hi_[static_cast<size_t>(a)] - lo_[static_cast<size_t>(a)] + 1; }
  std::int64_t size() const { return size_; }

  double node(int a, std::int64_t k) const { return static_cast<double>(lo_[static_cast<size_t>(a)] + k) / m_; }

  Box box() const {
    Box b;
    for (size_t a = 0; a < lo_.size(); ++a)
      b.axes.push_back({static_cast<double>(lo_[a]) / m_, static_cast<double>(hi_[a]) / m_});
    return b;
  }

  /// Per-axis local node offsets of a flat (row-major) position.
  void unflatten(std::int64_t flat, std::vector<std::int64_t>& local) const {
    local.resize(lo_.size());
    for (size_t a = 0; a < lo_.size(); ++a) {
      local[a] = flat / strides_[a];
      flat -= local[a] * strides_[a];
    }
  }

  std::int64_t flatten(std::span<const std::int64_t> local) const {
    std::int64_t f = 0;
    for (size_t a = 0; a < lo_.size(); ++a) f += local[a] * strides_[a];
    return f;
  }

  std::int64_t stride(int a) const { return strides_[static_cast<size_t>(a)]; }

  void point(std::int64_t flat, std::vector<double>& x) const {
    x.resize(lo_.size());
    for (size_t a = 0; a < lo_.size(); ++a) {
      const std::int64_t k = flat / strides_[a];
      flat -= k * strides_[a];
      x[a] = static_cast<double>(lo_[a] + k) / m_;
    }
  }

  /// Composite trapezoid weight of one node along axis a.
  double axis_weight(int a, std::int64_t k) const {
    if (count(a) == 1) return 0.0;
    const double h = spacing();
    return (k == 0 || k == count(a) - 1) ? 0.5 * h : h;
  }

  double weight(std::int64_t flat) const {
    double w = 1.0;
    for (size_t a = 0; a < lo_.size(); ++a) {
      const std::int64_t k = flat / strides_[a];
      flat -= k * strides_[a];
      w *= axis_weight(static_cast<int>(a), k);
    }
    return w;
  }

  bool same_lattice(const GridBox& o) const { return m_ == o.m_ && lo_.size() == o.lo_.size(); }

  /// True when every node of `inner` is a node of this grid.
  bool contains(const GridBox& inner) const {
    if (!same_lattice(inner)) return false;
    for (size_t a = 0; a < lo_.size(); ++a)
      if (inner.lo_[a] < lo_[a] || inner.hi_[a] > hi_[a]) return false;
    return true;
  }

  bool operator==(const GridBox& o) const { return m_ == o.m_ && lo_ == o.lo_ && hi_ == o.hi_; }

 private:
  static std::int64_t to_node(double v, int m, const char* which) {
    const double s = v * m;
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9)
      throw IncommensurateGrid(std::string("GridBox: ") + which + " endpoint " + message_number(v) +
                               " is not a multiple of 1/" + std::to_string(m));
    return static_cast<std::int64_t>(r);
  }

  void build_strides() {
    strides_.assign(lo_.size(), 1);
    size_ = 1;
    for (size_t a = lo_.size(); a-- > 0;) {
      strides_[a] = size_;
      size_ *= (hi_[a] - lo_[a] + 1);
    }
  }

  int m_ = 2;
  std::vector<std::int64_t> lo_;
  std::vector<std::int64_t> hi_;
  std::vector<std::int64_t> strides_;
  std::int64_t size_ = 0;
};

/// Complex samples of a function at the nodes of a GridBox (row-major).
struct SampledField {
  GridBox grid;
  std::vector<Complex> values;

  SampledField() = default;
  explicit SampledField(GridBox g) : grid(std::move(g)), values(static_cast<size_t>(grid.size())) {}
  SampledField(GridBox g, std::vector<Complex> v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<std::int64_t>(values.size()) != grid.size())
      throw InvalidArgument("SampledField: value count " + std::to_string(values.size()) +
                            " does not match grid size " + std::to_string(grid.size()));
  }

  double sup_abs() const {
    double r = 0.0;
    for (const auto& v : values) r = std::max(r, std::abs(v));
    return r;
  }
};

/// Composite trapezoid approximation of the integral of f over its box.
inline Complex quad(const SampledField& f) {
  const GridBox& g = f.grid;
  const int d = g.dim();
  // Separable weights: accumulate along the last axis first for a fixed summation order.
  std::vector<std::vector<double>> w(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) {
    w[static_cast<size_t>(a)].resize(static_cast<size_t>(g.count(a)));
    for (std::int64_t k = 0; k < g.count(a); ++k) w[static_cast<size_t>(a)][static_cast<size_t>(k)] = g.axis_weight(a, k);
  }
  Complex total{};
  std::vector<std::int64_t> local;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    g.unflatten(i, local);
    double wt = 1.0;
    for (int a = 0; a < d; ++a) wt *= w[static_cast<size_t>(a)][static_cast<size_t>(local[static_cast<size_t>(a)])];
    total += wt * f.values[static_cast<size_t>(i)];
  }
  return total;
}

/// L^2 norm of a sampled field by the same trapezoid rule.
inline double l2_norm(const SampledField& f) {
  SampledField sq(f.grid);
  for (size_t i = 0; i < f.values.size(); ++i) sq.values[i] = std::norm(f.values[i]);
  return std::sqrt(std::max(0.0, quad(sq).real()));
}

}  // namespace lbmult
