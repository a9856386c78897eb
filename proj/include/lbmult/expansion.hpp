// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <tuple>
#include <vector>

#include "lbmult/bump.hpp"
#include "lbmult/error.hpp"
#include "lbmult/fft.hpp"
#include "lbmult/grid.hpp"
#include "lbmult/lattice.hpp"

namespace lbmult {

/// Phi(xi, eta) ~ sum b_{k,l} e^{2 pi i k.xi/T} e^{2 pi i l.eta/T} phi(xi) phi(eta) on R^n x R^n.
struct SeparableExpansion {
  struct Term {
    LatticeIndex k;
    LatticeIndex l;
    Complex b;
  };

  int n = 1;
  int T = 2;
  /// Samples per axis of the periodic grid on TQ.
  int N = 0;
  /// Truncation: |k|_inf, |l|_inf <= cap.
  int cap = 0;
  BumpSpec cutoff;
  std::vector<Term> terms;
  /// Every coefficient with |k|_inf, |l|_inf <= cap before small terms were dropped.
  std::map<std::pair<LatticeIndex, LatticeIndex>, Complex> box_coefficients;
  /// Sup reconstruction error of `terms` on the sample grid.
  double error = 0.0;
};

namespace detail {

/// Periodic samples of Phi on TQ x TQ and its full set of Fourier coefficients.
class ExpansionWork {
 public:
  ExpansionWork(const BumpSpec& Phi, int T, int N) : d_(Phi.dim()), T_(T), N_(N) {
    const std::vector<int> shape(static_cast<size_t>(d_), N);
    fwd_ = std::make_unique<FftPlan>(shape, FFTW_FORWARD);
    bwd_ = std::make_unique<FftPlan>(shape, FFTW_BACKWARD);
    const std::int64_t total = fwd_->size();
    samples_.resize(static_cast<size_t>(total));
    weight_.resize(static_cast<size_t>(total));
    const BumpSpec cut1 = bumps::plateau(Box::cube(1, -T / 4.0, T / 4.0), Box::cube(1, -T / 2.0, T / 2.0));
    std::vector<double> c1(static_cast<size_t>(N));
    std::vector<double> node(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) {
      node[static_cast<size_t>(j)] = -T / 2.0 + static_cast<double>(j) * T / N;
      c1[static_cast<size_t>(j)] = cut1({node[static_cast<size_t>(j)]}).real();
    }
    std::vector<double> x(static_cast<size_t>(d_));
    std::vector<int> idx(static_cast<size_t>(d_));
    for (std::int64_t f = 0; f < total; ++f) {
      std::int64_t r = f;
      double w = 1.0;
      for (int a = d_ - 1; a >= 0; --a) {
        idx[static_cast<size_t>(a)] = static_cast<int>(r % N);
        r /= N;
        x[static_cast<size_t>(a)] = node[static_cast<size_t>(idx[static_cast<size_t>(a)])];
        w *= c1[static_cast<size_t>(idx[static_cast<size_t>(a)])];
      }
      samples_[static_cast<size_t>(f)] = Phi(std::span<const double>(x));
      weight_[static_cast<size_t>(f)] = w;
    }
    auto buf = fwd_->data();
    std::copy(samples_.begin(), samples_.end(), buf.begin());
    fwd_->execute();
    coef_.assign(buf.begin(), buf.end());
    const double scale = std::pow(static_cast<double>(N), -d_);
    for (std::int64_t f = 0; f < total; ++f) {
      int parity = 0;
      std::int64_t r = f;
      for (int a = d_ - 1; a >= 0; --a) {
        const std::int64_t j = r % N;
        r /= N;
        parity += static_cast<int>(signed_index(j));
      }
      coef_[static_cast<size_t>(f)] *= (parity % 2 == 0 ? scale : -scale);
    }
  }

  int dim() const { return d_; }
  int N() const { return N_; }

  /// Signed frequency of FFT slot j.
  std::int64_t signed_index(std::int64_t j) const { return j < (N_ + 1) / 2 ? j : j - N_; }

  /// Coefficient b at signed multi-index k (all |k_a| < N/2).
  Complex coefficient(std::span<const int> k) const {
    std::int64_t f = 0;
    for (int a = 0; a < d_; ++a) f = f * N_ + positive_mod(k[static_cast<size_t>(a)], N_);
    return coef_[static_cast<size_t>(f)];
  }

  /// Sup over the sample grid of |sum_{kept} b e(...) cutoff - Phi|; keep(k) selects coefficients.
  template <class Keep>
  double error(Keep&& keep) {
    auto buf = bwd_->data();
    const std::int64_t total = bwd_->size();
    std::vector<int> k(static_cast<size_t>(d_));
    for (std::int64_t f = 0; f < total; ++f) {
      std::int64_t r = f;
      int parity = 0;
      for (int a = d_ - 1; a >= 0; --a) {
        k[static_cast<size_t>(a)] = static_cast<int>(signed_index(r % N_));
        r /= N_;
        parity += k[static_cast<size_t>(a)];
      }
      const Complex b = coef_[static_cast<size_t>(f)];
      buf[static_cast<size_t>(f)] = (b != Complex{} && keep(std::span<const int>(k), b)) ? (parity % 2 == 0 ? b : -b) : Complex{};
    }
    bwd_->execute();
    double e = 0.0;
    for (std::int64_t f = 0; f < total; ++f)
      e = std::max(e, std::abs(buf[static_cast<size_t>(f)] * weight_[static_cast<size_t>(f)] - samples_[static_cast<size_t>(f)]));
    return e;
  }

  double error_at_cap(int cap) {
    return error([cap](std::span<const int> k, Complex) {
      for (int v : k)
        if (std::abs(v) > cap) return false;
      return true;
    });
  }

 private:
  int d_, T_, N_;
  std::unique_ptr<FftPlan> fwd_, bwd_;
  std::vector<Complex> samples_;
  std::vector<double> weight_;
  std::vector<Complex> coef_;
};

/// Smallest even T with supp Phi inside [-T/4, T/4]^d.
inline int expansion_period(const BumpSpec& Phi) {
  double r = 0.0;
  for (const auto& ax : Phi.support().axes) r = std::max({r, std::abs(ax.lo), std::abs(ax.hi)});
  int T = static_cast<int>(std::ceil(4.0 * r - 1e-12));
  if (T % 2) ++T;
  return std::max(T, 2);
}

inline int expansion_samples_per_unit(int d) { return d <= 2 ? 64 : 16; }

inline void check_expansion_input(const BumpSpec& Phi) {
  if (Phi.dim() % 2) throw InvalidArgument("separable_expansion: Phi must live on R^n x R^n (even dimension)");
}

}  // namespace detail

/// Sup reconstruction error with the coefficient box |k|_inf, |l|_inf <= cap, for each cap.
inline std::vector<double> expansion_error_profile(const BumpSpec& Phi, const std::vector<int>& caps) {
  detail::check_expansion_input(Phi);
  const int T = detail::expansion_period(Phi);
  detail::ExpansionWork work(Phi, T, T * detail::expansion_samples_per_unit(Phi.dim()));
  std::vector<double> out;
  for (int c : caps) out.push_back(work.error_at_cap(c));
  return out;
}

/// Fourier expansion of Phi on TQ x TQ truncated to the smallest coefficient box with
/// sup error <= tol/2, after which the smallest terms are dropped while their total
/// modulus stays <= tol/2.
inline SeparableExpansion separable_expansion(const BumpSpec& Phi, double tol) {
  detail::check_expansion_input(Phi);
  if (!(tol > 0.0)) throw InvalidArgument("separable_expansion: tol must be positive");
  const int d = Phi.dim();
  const int n = d / 2;
  SeparableExpansion ex;
  ex.n = n;
  ex.T = detail::expansion_period(Phi);
  ex.N = ex.T * detail::expansion_samples_per_unit(d);
  ex.cutoff = bumps::plateau(Box::cube(n, -ex.T / 4.0, ex.T / 4.0), Box::cube(n, -ex.T / 2.0, ex.T / 2.0));

  detail::ExpansionWork work(Phi, ex.T, ex.N);
  const int max_cap = ex.N / 2 - 1;
  int cap = 0;
  double err = work.error_at_cap(0);
  while (err > 0.5 * tol && cap < max_cap) err = work.error_at_cap(++cap);
  if (err > 0.5 * tol)
    throw NumericalFailure("separable_expansion: tolerance unreachable within index cap " + std::to_string(max_cap) +
                           " (achieved error " + message_number(err) + ")");
  ex.cap = cap;

  std::vector<SeparableExpansion::Term> kept;
  for (const auto& idx : lattice_cube(d, cap)) {
    const Complex b = work.coefficient(std::span<const int>(idx.coords));
    LatticeIndex k(std::vector<int>(idx.coords.begin(), idx.coords.begin() + n));
    LatticeIndex l(std::vector<int>(idx.coords.begin() + n, idx.coords.end()));
    ex.box_coefficients[{k, l}] = b;
    if (b != Complex{}) kept.push_back({k, l, b});
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return std::abs(a.b) < std::abs(b.b); });
  double dropped = 0.0;
  size_t first = 0;
  while (first < kept.size() && dropped + std::abs(kept[first].b) <= 0.5 * tol) dropped += std::abs(kept[first++].b);
  kept.erase(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(first));
  std::map<LatticeIndex, bool> keep_set;
  for (const auto& t : kept) {
    std::vector<int> c = t.k.coords;
    c.insert(c.end(), t.l.coords.begin(), t.l.coords.end());
    keep_set[LatticeIndex(c)] = true;
  }
  ex.error = work.error([&](std::span<const int> k, Complex) {
    return keep_set.count(LatticeIndex(std::vector<int>(k.begin(), k.end()))) > 0;
  });
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return std::tie(a.k, a.l) < std::tie(b.k, b.l);
  });
  ex.terms = std::move(kept);
  return ex;
}

/// Evaluates the truncated expansion at (xi, eta).
inline Complex evaluate(const SeparableExpansion& ex, std::span<const double> x) {
  const int n = ex.n;
  if (static_cast<int>(x.size()) != 2 * n) throw DimensionMismatch("evaluate(SeparableExpansion)", 2 * n, static_cast<int>(x.size()));
  const Complex cut = ex.cutoff(x.subspan(0, static_cast<size_t>(n))) * ex.cutoff(x.subspan(static_cast<size_t>(n)));
  if (cut == Complex{}) return {};
  Complex s{};
  for (const auto& t : ex.terms) {
    double ph = 0.0;
    for (int a = 0; a < n; ++a) ph += t.k[a] * x[static_cast<size_t>(a)] + t.l[a] * x[static_cast<size_t>(n + a)];
    s += t.b * std::polar(1.0, 2.0 * std::numbers::pi * ph / ex.T);
  }
  return s * cut;
}

/// max over |k|_1 + |l|_1 = s of |b_{k,l}| for s = 0 .. 2 n cap, from the untruncated coefficient box.
inline std::vector<double> shell_maxima(const SeparableExpansion& ex) {
  std::vector<double> out(static_cast<size_t>(2 * ex.n * ex.cap + 1), 0.0);
  for (const auto& [key, b] : ex.box_coefficients) {
    int s = 0;
    for (int v : key.first.coords) s += std::abs(v);
    for (int v : key.second.coords) s += std::abs(v);
    out[static_cast<size_t>(s)] = std::max(out[static_cast<size_t>(s)], std::abs(b));
  }
  return out;
}

}  // namespace lbmult
