// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lbmult/error.hpp"

namespace lbmult {

using Complex = std::complex<double>;

/// A point of the integer lattice Z^n.
struct LatticeIndex {
  std::vector<int> coords;

  LatticeIndex() = default;
  explicit LatticeIndex(std::vector<int> c) : coords(std::move(c)) {}
  LatticeIndex(std::initializer_list<int> c) : coords(c) {}

  static LatticeIndex zero(int n) { return LatticeIndex(std::vector<int>(static_cast<size_t>(n), 0)); }

  int dim() const { return static_cast<int>(coords.size()); }
  int operator[](int i) const { return coords[static_cast<size_t>(i)]; }

  int sup_norm() const {
    int r = 0;
    for (int c : coords) r = std::max(r, std::abs(c));
    return r;
  }

  double euclidean_norm() const {
    double s = 0.0;
    for (int c : coords) s += static_cast<double>(c) * c;
    return std::sqrt(s);
  }

  LatticeIndex operator+(const LatticeIndex& o) const {
    check_same_dim(o);
    LatticeIndex r = *this;
    for (size_t i = 0; i < coords.size(); ++i) r.coords[i] += o.coords[i];
    return r;
  }

  LatticeIndex operator-(const LatticeIndex& o) const {
    check_same_dim(o);
    LatticeIndex r = *this;
    for (size_t i = 0; i < coords.size(); ++i) r.coords[i] -= o.coords[i];
    return r;
  }

  auto operator<=>(const LatticeIndex&) const = default;
  bool operator==(const LatticeIndex&) const = default;

  std::string to_string() const {
    std::string s = "(";
    for (size_t i = 0; i < coords.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(coords[i]);
    }
    return s + ")";
  }

 private:
  void check_same_dim(const LatticeIndex& o) const {
    if (o.coords.size() != coords.size())
      throw DimensionMismatch("LatticeIndex", dim(), o.dim());
  }
};

/// Finitely supported complex sequence on Z^n (an element of l^2_0).
class LatticeSequence {
 public:
  explicit LatticeSequence(int n = 1) : n_(n) {}

  LatticeSequence(int n, std::map<LatticeIndex, Complex> values) : n_(n), values_(std::move(values)) {
    for (const auto& [k, v] : values_) validate(k, v);
  }

  static LatticeSequence delta(const LatticeIndex& at) {
    LatticeSequence s(at.dim());
    s.set(at, 1.0);
    return s;
  }

  int dim() const { return n_; }
  bool empty() const { return values_.empty(); }
  size_t size() const { return values_.size(); }

  void set(const LatticeIndex& k, Complex v) {
    validate(k, v);
    values_[k] = v;
  }

  Complex operator()(const LatticeIndex& k) const {
    auto it = values_.find(k);
    return it == values_.end() ? Complex{} : it->second;
  }

  const std::map<LatticeIndex, Complex>& values() const { return values_; }

  double norm() const {
    double s = 0.0;
    for (const auto& [k, v] : values_) s += std::norm(v);
    return std::sqrt(s);
  }

  LatticeSequence normalized() const {
    const double nrm = norm();
    if (nrm == 0.0) throw InvalidArgument("LatticeSequence::normalized: zero sequence");
    return scaled(1.0 / nrm);
  }

  LatticeSequence scaled(Complex c) const {
    LatticeSequence r(n_);
    for (const auto& [k, v] : values_) r.values_[k] = c * v;
    return r;
  }

  /// Returns S with S(k + shift) = this(k).
  LatticeSequence translated(const LatticeIndex& shift) const {
    LatticeSequence r(n_);
    for (const auto& [k, v] : values_) r.values_[k + shift] = v;
    return r;
  }

  LatticeSequence operator+(const LatticeSequence& o) const {
    if (o.n_ != n_) throw DimensionMismatch("LatticeSequence::operator+", n_, o.n_);
    LatticeSequence r = *this;
    for (const auto& [k, v] : o.values_) r.values_[k] += v;
    return r;
  }

 private:
  void validate(const LatticeIndex& k, Complex v) const {
    if (k.dim() != n_) throw DimensionMismatch("LatticeSequence", n_, k.dim());
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("LatticeSequence: non-finite value at " + k.to_string());
  }

  int n_;
  std::map<LatticeIndex, Complex> values_;
};

/// Finitely supported coefficient family A = (a_{mu,nu}) on Z^n x Z^n.
class LatticeMatrix {
 public:
  using Key = std::pair<LatticeIndex, LatticeIndex>;

  struct Entry {
    LatticeIndex mu;
    LatticeIndex nu;
    Complex value;
  };

  explicit LatticeMatrix(int n = 1) : n_(n) {
    if (n < 1) throw InvalidArgument("LatticeMatrix: dimension must be >= 1");
  }

  /// Duplicate (mu, nu) keys are rejected.
  LatticeMatrix(int n, const std::vector<Entry>& entries) : LatticeMatrix(n) {
    for (const auto& e : entries) {
      validate(e.mu, e.nu, e.value);
      if (!entries_.emplace(Key{e.mu, e.nu}, e.value).second)
        throw InvalidArgument("LatticeMatrix: duplicate entry " + e.mu.to_string() + "," + e.nu.to_string());
      support_radius_ = std::max({support_radius_, e.mu.sup_norm(), e.nu.sup_norm()});
    }
  }

  int dim() const { return n_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  int support_radius() const { return support_radius_; }
  const std::map<Key, Complex>& entries() const { return entries_; }

  Complex operator()(const LatticeIndex& mu, const LatticeIndex& nu) const {
    auto it = entries_.find(Key{mu, nu});
    return it == entries_.end() ? Complex{} : it->second;
  }

  double max_abs() const {
    double r = 0.0;
    for (const auto& [k, v] : entries_) r = std::max(r, std::abs(v));
    return r;
  }

  double l1_norm() const {
    double r = 0.0;
    for (const auto& [k, v] : entries_) r += std::abs(v);
    return r;
  }

  bool is_nonnegative() const {
    for (const auto& [k, v] : entries_)
      if (v.imag() != 0.0 || v.real() < 0.0) return false;
    return true;
  }

  LatticeMatrix scaled(Complex c) const {
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (const auto& [k, v] : entries_) out.push_back({k.first, k.second, c * v});
    return LatticeMatrix(n_, out);
  }

  /// Returns B with b_{mu+mu0, nu+nu0} = a_{mu,nu}.
  LatticeMatrix translated(const LatticeIndex& mu0, const LatticeIndex& nu0) const {
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (const auto& [k, v] : entries_) out.push_back({k.first + mu0, k.second + nu0, v});
    return LatticeMatrix(n_, out);
  }

  std::vector<Entry> entry_list() const {
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (const auto& [k, v] : entries_) out.push_back({k.first, k.second, v});
    return out;
  }

 private:
  void validate(const LatticeIndex& mu, const LatticeIndex& nu, Complex v) const {
    if (mu.dim() != n_) throw DimensionMismatch("LatticeMatrix (mu)", n_, mu.dim());
    if (nu.dim() != n_) throw DimensionMismatch("LatticeMatrix (nu)", n_, nu.dim());
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("LatticeMatrix: non-finite entry at " + mu.to_string() + "," + nu.to_string());
  }

  int n_;
  int support_radius_ = 0;
  std::map<Key, Complex> entries_;
};

/// Index vectors enumerating the integer box [lo, hi] in row-major order.
inline std::vector<LatticeIndex> lattice_box(const std::vector<int>& lo, const std::vector<int>& hi) {
  std::vector<LatticeIndex> out;
  const size_t d = lo.size();
  for (size_t i = 0; i < d; ++i)
    if (hi[i] < lo[i]) return out;
  std::vector<int> cur = lo;
  while (true) {
    out.emplace_back(cur);
    size_t axis = d;
    while (axis > 0) {
      --axis;
      if (++cur[axis] <= hi[axis]) break;
      cur[axis] = lo[axis];
      if (axis == 0) return out;
    }
    if (d == 0) return out;
  }
}

inline std::vector<LatticeIndex> lattice_cube(int n, int radius) {
  return lattice_box(std::vector<int>(static_cast<size_t>(n), -radius),
                     std::vector<int>(static_cast<size_t>(n), radius));
}

}  // namespace lbmult
