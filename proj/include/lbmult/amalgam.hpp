// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "lbmult/error.hpp"
#include "lbmult/grid.hpp"
#include "lbmult/lattice.hpp"

namespace lbmult {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (L^2, l^q) norm: l^q over nu of the L^2 mass of f on the unit cube nu + Q.
struct AmalgamNorm {
  double q = 2.0;
  std::map<LatticeIndex, double> per_cube;
  double value = 0.0;
};

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// l^q norm of nonnegative values, scaled by their max so large q does not overflow.
inline double lq_norm(const std::vector<double>& v, double q) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, x);
  if (mx == 0.0 || std::isinf(q)) return mx;
  double s = 0.0;
  for (double x : v) s += std::pow(x / mx, q);
  return mx * std::pow(s, 1.0 / q);
}

}  // namespace detail

/// Splits every trapezoid cell into two half-cells and credits each to the cube holding
/// it, so the cube masses add up exactly to the global trapezoid integral of |f|^2.
inline AmalgamNorm amalgam_norm(const SampledField& f, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("amalgam_norm: q must lie in [1, inf]");
  const GridBox& g = f.grid;
  if (!g.cube_aligned()) throw InvalidArgument("amalgam_norm: grid is not cube-aligned (m must be even)");
  const int d = g.dim();
  const std::int64_t m = g.m();
  const double half = 0.5 * g.spacing();

  // Per axis and node: up to two (cube, weight) contributions.
  struct Part {
    int cube;
    double w;
  };
  std::vector<std::vector<std::vector<Part>>> parts(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) {
    auto& pa = parts[static_cast<size_t>(a)];
    pa.resize(static_cast<size_t>(g.count(a)));
    if (g.count(a) == 1) continue;
    for (std::int64_t k = 0; k < g.count(a); ++k) {
      const std::int64_t K = g.lo_index(a) + k;
      if (k > 0) pa[static_cast<size_t>(k)].push_back({static_cast<int>(detail::floor_div(4 * K - 1 + 2 * m, 4 * m)), half});
      if (k + 1 < g.count(a)) pa[static_cast<size_t>(k)].push_back({static_cast<int>(detail::floor_div(4 * K + 1 + 2 * m, 4 * m)), half});
    }
  }

  std::map<LatticeIndex, double> mass;
  std::vector<std::int64_t> local;
  std::vector<size_t> choice(static_cast<size_t>(d));
  std::vector<int> cube(static_cast<size_t>(d));
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const double v = std::norm(f.values[static_cast<size_t>(i)]);
    g.unflatten(i, local);
    bool empty = false;
    for (int a = 0; a < d; ++a)
      if (parts[static_cast<size_t>(a)][static_cast<size_t>(local[static_cast<size_t>(a)])].empty()) empty = true;
    if (empty) continue;
    std::fill(choice.begin(), choice.end(), 0);
    while (true) {
      double w = 1.0;
      for (int a = 0; a < d; ++a) {
        const auto& p = parts[static_cast<size_t>(a)][static_cast<size_t>(local[static_cast<size_t>(a)])][choice[static_cast<size_t>(a)]];
        w *= p.w;
        cube[static_cast<size_t>(a)] = p.cube;
      }
      mass[LatticeIndex(cube)] += w * v;
      int a = d - 1;
      for (; a >= 0; --a) {
        const auto& opts = parts[static_cast<size_t>(a)][static_cast<size_t>(local[static_cast<size_t>(a)])];
        if (++choice[static_cast<size_t>(a)] < opts.size()) break;
        choice[static_cast<size_t>(a)] = 0;
      }
      if (a < 0) break;
    }
  }

  AmalgamNorm out;
  out.q = q;
  std::vector<double> vals;
  for (const auto& [nu, m2] : mass) {
    const double r = std::sqrt(std::max(0.0, m2));
    out.per_cube[nu] = r;
    vals.push_back(r);
  }
  out.value = detail::lq_norm(vals, q);
  return out;
}

}  // namespace lbmult
