// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lbmult/error.hpp"
#include "lbmult/grid.hpp"

namespace lbmult {

/// Evaluable compactly supported function on R^d with a declared support box.
///
/// The evaluator is only consulted inside the support box; outside it the bump is
/// exactly zero.
class BumpSpec {
 public:
  using Evaluator = std::function<Complex(std::span<const double>)>;

  BumpSpec() = default;
  BumpSpec(Box support, Evaluator eval, bool real_valued, std::string name)
      : support_(std::move(support)),
        eval_(std::make_shared<const Evaluator>(std::move(eval))),
        real_valued_(real_valued),
        name_(std::move(name)) {
    if (support_.dim() < 1) throw InvalidArgument("BumpSpec: dimension must be >= 1");
    for (const auto& a : support_.axes)
      if (!(a.lo <= a.hi) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
        throw InvalidArgument("BumpSpec: invalid support box");
  }

  int dim() const { return support_.dim(); }
  const Box& support() const { return support_; }
  bool real_valued() const { return real_valued_; }
  const std::string& name() const { return name_; }

  Complex operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) throw DimensionMismatch("BumpSpec::operator()", dim(), static_cast<int>(x.size()));
    if (!support_.contains(x)) return {};
    return (*eval_)(x);
  }

  Complex operator()(std::initializer_list<double> x) const {
    std::vector<double> v(x);
    return (*this)(std::span<const double>(v));
  }

 private:
  Box support_;
  std::shared_ptr<const Evaluator> eval_;
  bool real_valued_ = true;
  std::string name_;
};

namespace bumps {

/// exp(-1/(1-t^2)) on (-1, 1), zero elsewhere.
inline double standard_1d(double t) {
  const double s = 1.0 - t * t;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

/// C-infinity step: 0 for s <= 0, 1 for s >= 1.
inline double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

/// Tensor power of the standard bump on [-1, 1]^d.
inline BumpSpec standard(int d = 1) {
  return BumpSpec(
      Box::cube(d, -1.0, 1.0),
      [](std::span<const double> x) {
        double v = 1.0;
        for (double t : x) v *= standard_1d(t);
        return Complex(v);
      },
      true, "std_bump");
}

/// prod_a standard_1d((x_a - center_a) / radius_a).
inline BumpSpec standard_scaled(std::vector<double> center, std::vector<double> radius) {
  if (center.size() != radius.size()) throw InvalidArgument("std_bump_scaled: center/radius rank differ");
  Box support;
  for (size_t a = 0; a < center.size(); ++a) {
    if (!(radius[a] > 0.0)) throw InvalidArgument("std_bump_scaled: radius must be positive");
    support.axes.push_back({center[a] - radius[a], center[a] + radius[a]});
  }
  return BumpSpec(
      support,
      [center = std::move(center), radius = std::move(radius)](std::span<const double> x) {
        double v = 1.0;
        for (size_t a = 0; a < x.size(); ++a) v *= standard_1d((x[a] - center[a]) / radius[a]);
        return Complex(v);
      },
      true, "std_bump_scaled");
}

inline BumpSpec standard_scaled(int d, double center, double radius) {
  return standard_scaled(std::vector<double>(static_cast<size_t>(d), center),
                         std::vector<double>(static_cast<size_t>(d), radius));
}

/// Equal to 1 on `inner`, 0 outside `outer`, smooth in between.
inline BumpSpec plateau(const Box& inner, const Box& outer) {
  if (inner.dim() != outer.dim()) throw DimensionMismatch("plateau", outer.dim(), inner.dim());
  for (int a = 0; a < inner.dim(); ++a)
    if (!(outer[a].lo < inner[a].lo && inner[a].lo <= inner[a].hi && inner[a].hi < outer[a].hi))
      throw InvalidArgument("plateau: inner box must lie strictly inside outer box");
  return BumpSpec(
      outer,
      [inner, outer](std::span<const double> x) {
        double v = 1.0;
        for (size_t a = 0; a < x.size(); ++a) {
          const auto& in = inner.axes[a];
          const auto& out = outer.axes[a];
          v *= smooth_step((x[a] - out.lo) / (in.lo - out.lo)) * smooth_step((out.hi - x[a]) / (out.hi - in.hi));
          if (v == 0.0) break;
        }
        return Complex(v);
      },
      true, "plateau");
}

/// (x_1, ..., x_k) -> prod_i f_i(x_i) with x_i ranging over consecutive coordinate blocks.
inline BumpSpec tensor(std::vector<BumpSpec> factors) {
  if (factors.empty()) throw InvalidArgument("tensor: no factors");
  Box support;
  bool real = true;
  for (const auto& f : factors) {
    support = support.product(f.support());
    real = real && f.real_valued();
  }
  return BumpSpec(
      support,
      [factors = std::move(factors)](std::span<const double> x) {
        Complex v = 1.0;
        size_t off = 0;
        for (const auto& f : factors) {
          const auto d = static_cast<size_t>(f.dim());
          v *= f(x.subspan(off, d));
          off += d;
          if (v == Complex{}) break;
        }
        return v;
      },
      real, "tensor");
}

/// sum_i w_i base(x - s_i).
inline BumpSpec shift_sum(BumpSpec base, std::vector<std::vector<double>> shifts, std::vector<Complex> weights) {
  if (shifts.size() != weights.size()) throw InvalidArgument("shift_sum: shifts/weights length differ");
  if (shifts.empty()) throw InvalidArgument("shift_sum: no shifts");
  Box support;
  bool real = base.real_valued();
  for (size_t i = 0; i < shifts.size(); ++i) {
    if (static_cast<int>(shifts[i].size()) != base.dim()) throw DimensionMismatch("shift_sum", base.dim(), static_cast<int>(shifts[i].size()));
    const Box b = base.support().translated(std::span<const double>(shifts[i]));
    support = i == 0 ? b : support.hull(b);
    real = real && weights[i].imag() == 0.0;
  }
  return BumpSpec(
      support,
      [base = std::move(base), shifts = std::move(shifts), weights = std::move(weights)](std::span<const double> x) {
        Complex v{};
        std::vector<double> y(x.size());
        for (size_t i = 0; i < shifts.size(); ++i) {
          if (weights[i] == Complex{}) continue;
          for (size_t a = 0; a < x.size(); ++a) y[a] = x[a] - shifts[i][a];
          v += weights[i] * base(std::span<const double>(y));
        }
        return v;
      },
      real, "shift_sum");
}

/// x -> b(x - s).
inline BumpSpec shifted(const BumpSpec& b, std::vector<double> s) {
  return shift_sum(b, {std::move(s)}, {Complex(1.0)});
}

}  // namespace bumps

/// Samples b at every node of g; nodes outside the support box are exact zeros.
inline SampledField sample(const BumpSpec& b, const GridBox& g) {
  if (g.dim() != b.dim()) throw DimensionMismatch("sample", b.dim(), g.dim());
  SampledField f(g);
  std::vector<double> x;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    f.values[static_cast<size_t>(i)] = b(std::span<const double>(x));
  }
  return f;
}

}  // namespace lbmult
