// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "lbmult/bump.hpp"
#include "lbmult/fft.hpp"
#include "lbmult/grid.hpp"

namespace lbmult {

namespace detail {

/// Evaluates out_q = sum_k v_k exp(2 pi i q k / P) for source lattice indices
/// k in [k_lo, k_lo + n_src) and target indices q in [q_lo, q_lo + n_tgt).
///
/// Uses a length-P FFT when cheaper than the direct sum; both routes reduce q*k
/// modulo P so the phases are exact up to rounding of a single exp.
class LineTransform {
 public:
  LineTransform(std::int64_t period, std::int64_t k_lo, std::int64_t n_src, std::int64_t q_lo, std::int64_t n_tgt)
      : period_(period), k_lo_(k_lo), n_src_(n_src), q_lo_(q_lo), n_tgt_(n_tgt) {
    const double p = static_cast<double>(period);
    const double fft_cost = 5.0 * p * std::log2(std::max(2.0, p)) + p;
    const double direct_cost = 8.0 * static_cast<double>(n_src) * static_cast<double>(n_tgt);
    use_fft_ = fft_cost < direct_cost;
    if (use_fft_) {
      plan_ = std::make_unique<FftPlan>(std::vector<int>{static_cast<int>(period)}, FFTW_BACKWARD);
    } else {
      phase_.resize(static_cast<size_t>(period));
      for (std::int64_t r = 0; r < period; ++r)
        phase_[static_cast<size_t>(r)] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / p);
    }
  }

  void apply(const Complex* src, std::int64_t src_stride, Complex* dst, std::int64_t dst_stride) {
    if (use_fft_) {
      auto buf = plan_->data();
      plan_->zero();
      for (std::int64_t j = 0; j < n_src_; ++j)
        buf[static_cast<size_t>(positive_mod(k_lo_ + j, period_))] += src[j * src_stride];
      plan_->execute();
      for (std::int64_t t = 0; t < n_tgt_; ++t)
        dst[t * dst_stride] = buf[static_cast<size_t>(positive_mod(q_lo_ + t, period_))];
    } else {
      for (std::int64_t t = 0; t < n_tgt_; ++t) {
        const std::int64_t q = q_lo_ + t;
        Complex acc{};
        for (std::int64_t j = 0; j < n_src_; ++j) {
          const std::int64_t r = positive_mod(positive_mod(q, period_) * positive_mod(k_lo_ + j, period_), period_);
          acc += src[j * src_stride] * phase_[static_cast<size_t>(r)];
        }
        dst[t * dst_stride] = acc;
      }
    }
  }

 private:
  std::int64_t period_, k_lo_, n_src_, q_lo_, n_tgt_;
  bool use_fft_ = false;
  std::unique_ptr<FftPlan> plan_;
  std::vector<Complex> phase_;
};

/// For real input the transform satisfies out(-x) = conj(out(x)); copy the value at the
/// lexicographically positive node of every +-x pair so the identity holds bit for bit.
inline void impose_conjugate_symmetry(const GridBox& g, std::vector<Complex>& v) {
  const int d = g.dim();
  std::vector<std::int64_t> local(static_cast<size_t>(d)), mirror(static_cast<size_t>(d));
  for (std::int64_t i = 0; i < g.size(); ++i) {
    g.unflatten(i, local);
    int sign = 0;
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      const std::int64_t k = g.lo_index(a) + local[static_cast<size_t>(a)];
      if (sign == 0 && k != 0) sign = k > 0 ? 1 : -1;
      const std::int64_t mk = -k - g.lo_index(a);
      if (mk < 0 || mk >= g.count(a)) inside = false;
      mirror[static_cast<size_t>(a)] = mk;
    }
    if (sign == 0) v[static_cast<size_t>(i)].imag(0.0);
    if (sign < 0 && inside) v[static_cast<size_t>(i)] = std::conj(v[static_cast<size_t>(g.flatten(mirror))]);
  }
}

}  // namespace detail

/// Default number of frequency samples per unit length used by inverse_fourier.
inline constexpr int kDefaultFrequencyDensity = 512;

/// Quadrature of x -> int b(xi) e^{2 pi i x.xi} dxi at every node of `target`.
///
/// b is sampled on the 1/freq_density lattice covering its support; the transform to
/// the target nodes is done axis by axis with FFTs of length m_target * freq_density,
/// so target nodes are hit exactly without interpolation.
inline SampledField inverse_fourier(const BumpSpec& b, const GridBox& target, int freq_density = kDefaultFrequencyDensity) {
  if (target.dim() != b.dim()) throw DimensionMismatch("inverse_fourier", b.dim(), target.dim());
  if (freq_density < 2) throw InvalidArgument("inverse_fourier: frequency density must be >= 2");
  const int d = b.dim();
  const std::int64_t period = static_cast<std::int64_t>(target.m()) * freq_density;
  if (period > (std::int64_t{1} << 26))
    throw IncommensurateGrid("inverse_fourier: transform grid 1/" + std::to_string(period) + " too fine");

  const GridBox src_grid = GridBox::covering(b.support(), freq_density);
  SampledField work = sample(b, src_grid);
  for (std::int64_t i = 0; i < src_grid.size(); ++i) work.values[static_cast<size_t>(i)] *= src_grid.weight(i);

  // shape[a] starts as the source node count and is replaced by the target count once
  // axis a has been transformed.
  std::vector<std::int64_t> shape(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) shape[static_cast<size_t>(a)] = src_grid.count(a);
  std::vector<Complex> cur = std::move(work.values);

  for (int a = 0; a < d; ++a) {
    std::vector<std::int64_t> next_shape = shape;
    next_shape[static_cast<size_t>(a)] = target.count(a);
    std::int64_t outer = 1, inner = 1;
    for (int b2 = 0; b2 < a; ++b2) outer *= shape[static_cast<size_t>(b2)];
    for (int b2 = a + 1; b2 < d; ++b2) inner *= shape[static_cast<size_t>(b2)];
    const std::int64_t n_src = shape[static_cast<size_t>(a)];
    const std::int64_t n_tgt = target.count(a);
    // Phase exp(2 pi i (q/m)(k/M)) = exp(2 pi i qk / (mM)).
    detail::LineTransform line(period, src_grid.lo_index(a), n_src, target.lo_index(a), n_tgt);
    std::vector<Complex> nxt(static_cast<size_t>(outer * n_tgt * inner));
    for (std::int64_t o = 0; o < outer; ++o)
      for (std::int64_t i = 0; i < inner; ++i)
        line.apply(cur.data() + o * n_src * inner + i, inner, nxt.data() + o * n_tgt * inner + i, inner);
    cur = std::move(nxt);
    shape = next_shape;
  }
  if (b.real_valued()) detail::impose_conjugate_symmetry(target, cur);
  return SampledField(target, std::move(cur));
}

}  // namespace lbmult
