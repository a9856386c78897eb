// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "lbmult/amalgam.hpp"
#include "lbmult/bump.hpp"
#include "lbmult/error.hpp"
#include "lbmult/fft.hpp"
#include "lbmult/grid.hpp"
#include "lbmult/lattice.hpp"
#include "lbmult/parallel.hpp"

namespace lbmult {

/// sigma_{A,Phi}(xi, eta) = sum a_{mu,nu} Phi(xi - mu, eta - nu) sampled on a 2n-dim grid.
struct MultiplierField {
  LatticeMatrix A{1};
  BumpSpec Phi;
  GridBox grid;
  std::vector<Complex> samples;

  int n() const { return A.dim(); }
  SampledField field() const { return SampledField(grid, samples); }
};

/// A band-limited function given by its spectrum; declared_norm = ||f||_{L^2} = ||f^||_{L^2}.
struct BandLimitedInput {
  SampledField spectrum;
  double declared_norm = 0.0;

  BandLimitedInput() = default;
  explicit BandLimitedInput(SampledField s) : spectrum(std::move(s)), declared_norm(l2_norm(spectrum)) {}
  BandLimitedInput(SampledField s, double declared) : spectrum(std::move(s)), declared_norm(declared) {
    const double actual = l2_norm(spectrum);
    if (std::abs(actual - declared) > 1e-10 * std::max(1.0, actual))
      throw InvalidArgument("BandLimitedInput: declared norm " + std::to_string(declared) + " differs from spectral norm " +
                            std::to_string(actual));
  }

  BandLimitedInput scaled(Complex c) const {
    SampledField s = spectrum;
    for (auto& v : s.values) v *= c;
    return BandLimitedInput(std::move(s));
  }
};

/// Grid over sigma's xi (offset 0) or eta (offset n) coordinates.
inline GridBox spectral_grid(const MultiplierField& s, int offset) {
  std::vector<std::int64_t> lo, hi;
  for (int a = 0; a < s.n(); ++a) {
    lo.push_back(s.grid.lo_index(offset + a));
    hi.push_back(s.grid.hi_index(offset + a));
  }
  return GridBox(s.grid.m(), lo, hi);
}

/// Samples sigma_{A,Phi} on the half-integer box (supp A index box) + supp Phi, hulled with min_box.
inline MultiplierField assemble_sigma(const LatticeMatrix& A, const BumpSpec& Phi, int m,
                                      const std::optional<Box>& min_box = std::nullopt) {
  const int n = A.dim();
  if (Phi.dim() != 2 * n) throw DimensionMismatch("assemble_sigma", 2 * n, Phi.dim());
  if (m < 2 || m % 2) throw InvalidArgument("assemble_sigma: m must be even and >= 2");
  if (min_box && min_box->dim() != 2 * n) throw DimensionMismatch("assemble_sigma (min_box)", 2 * n, min_box->dim());

  Box box = Phi.support();
  bool first = true;
  for (const auto& [key, a] : A.entries()) {
    std::vector<double> s;
    for (int c : key.first.coords) s.push_back(c);
    for (int c : key.second.coords) s.push_back(c);
    const Box b = Phi.support().translated(std::span<const double>(s));
    box = first ? b : box.hull(b);
    first = false;
  }
  if (min_box) box = box.hull(*min_box);
  box = box.rounded_to_half_integers();

  MultiplierField out;
  out.A = A;
  out.Phi = Phi;
  out.grid = GridBox::exact(box, m);
  out.samples.assign(static_cast<size_t>(out.grid.size()), Complex{});

  const GridBox pg = GridBox::covering(Phi.support(), m);
  const SampledField ps = sample(Phi, pg);
  const int d = 2 * n;
  std::vector<std::int64_t> local, tgt(static_cast<size_t>(d));
  for (const auto& [key, a] : A.entries()) {
    for (std::int64_t k = 0; k < pg.size(); ++k) {
      const Complex v = ps.values[static_cast<size_t>(k)];
      if (v == Complex{}) continue;
      pg.unflatten(k, local);
      bool inside = true;
      for (int ax = 0; ax < d; ++ax) {
        const int shift = ax < n ? key.first[ax] : key.second[ax - n];
        const std::int64_t K = pg.lo_index(ax) + local[static_cast<size_t>(ax)] + static_cast<std::int64_t>(shift) * m;
        if (K < out.grid.lo_index(ax) || K > out.grid.hi_index(ax)) {
          inside = false;
          break;
        }
        tgt[static_cast<size_t>(ax)] = K - out.grid.lo_index(ax);
      }
      if (inside) out.samples[static_cast<size_t>(out.grid.flatten(tgt))] += a * v;
    }
  }
  return out;
}

struct ApplyOptions {
  bool direct = false;
  int threads = 1;
};

namespace detail {

struct SpectralNode {
  std::vector<std::int64_t> K;  // global node indices
  Complex wv;                   // quadrature weight times spectrum value
  std::int64_t sigma_offset;    // contribution to sigma's flat index
};

inline std::vector<SpectralNode> spectral_nodes(const MultiplierField& s, const SampledField& f, int offset, const char* which) {
  const GridBox& g = f.grid;
  std::vector<SpectralNode> out;
  std::vector<std::int64_t> local;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const Complex v = f.values[static_cast<size_t>(i)];
    if (v == Complex{}) continue;
    g.unflatten(i, local);
    SpectralNode node{std::vector<std::int64_t>(static_cast<size_t>(g.dim())), g.weight(i) * v, 0};
    for (int a = 0; a < g.dim(); ++a) {
      const std::int64_t K = g.lo_index(a) + local[static_cast<size_t>(a)];
      if (K < s.grid.lo_index(offset + a) || K > s.grid.hi_index(offset + a))
        throw InvalidArgument(std::string("apply_T: spectrum of ") + which + " extends beyond the sigma grid box");
      node.K[static_cast<size_t>(a)] = K;
      node.sigma_offset += (K - s.grid.lo_index(offset + a)) * s.grid.stride(offset + a);
    }
    if (node.wv != Complex{}) out.push_back(std::move(node));
  }
  return out;
}

inline void check_apply_inputs(const MultiplierField& s, const BandLimitedInput& f, const BandLimitedInput& g, const GridBox& x) {
  const int n = s.n();
  if (f.spectrum.grid.dim() != n) throw DimensionMismatch("apply_T (f)", n, f.spectrum.grid.dim());
  if (g.spectrum.grid.dim() != n) throw DimensionMismatch("apply_T (g)", n, g.spectrum.grid.dim());
  if (x.dim() != n) throw DimensionMismatch("apply_T (x_grid)", n, x.dim());
  if (f.spectrum.grid.m() != s.grid.m() || g.spectrum.grid.m() != s.grid.m())
    throw IncommensurateGrid("apply_T: spectrum spacing differs from the sigma grid spacing 1/" + std::to_string(s.grid.m()));
  if (!x.cube_aligned()) throw IncommensurateGrid("apply_T: x_grid must be cube-aligned (even m)");
  for (int a = 0; a < n; ++a)
    if (x.count(a) - 1 > static_cast<std::int64_t>(s.grid.m()) * x.m())
      throw InvalidArgument("apply_T: x box wider than the period " + std::to_string(s.grid.m()) + " of the discrete output");
}

}  // namespace detail

/// T_sigma(f, g)(x) = sum_{xi, eta} w w' sigma(xi, eta) f^(xi) g^(eta) e^{2 pi i x.(xi + eta)} on x_grid.
///
/// Fast path: for every xi node the eta sum is one inverse FFT of length
/// P = m_sigma * m_x per axis (x.eta = q k / P exactly), followed by the e^{2 pi i x.xi}
/// phase. xi nodes are processed in fixed chunks of 16 whose partial sums are added in
/// chunk order, so the result does not depend on the thread count.
inline SampledField apply_T(const MultiplierField& sigma, const BandLimitedInput& f, const BandLimitedInput& g,
                            const GridBox& x_grid, const ApplyOptions& opt = {}) {
  detail::check_apply_inputs(sigma, f, g, x_grid);
  const int n = sigma.n();
  const auto fn = detail::spectral_nodes(sigma, f.spectrum, 0, "f");
  const auto gn = detail::spectral_nodes(sigma, g.spectrum, n, "g");
  SampledField out(x_grid);
  if (fn.empty() || gn.empty()) return out;
  const std::int64_t M = x_grid.size();

  std::vector<std::vector<std::int64_t>> xq(static_cast<size_t>(M));
  for (std::int64_t q = 0; q < M; ++q) {
    std::vector<std::int64_t> local;
    x_grid.unflatten(q, local);
    for (int a = 0; a < n; ++a) local[static_cast<size_t>(a)] += x_grid.lo_index(a);
    xq[static_cast<size_t>(q)] = std::move(local);
  }

  if (opt.direct) {
    // Independent oracle: phases from e^{2 pi i x xi} evaluated in floating point.
    auto table = [&](const std::vector<detail::SpectralNode>& nodes) {
      std::vector<Complex> t(static_cast<size_t>(M) * nodes.size());
      for (std::int64_t q = 0; q < M; ++q)
        for (size_t i = 0; i < nodes.size(); ++i) {
          double ph = 0.0;
          for (int a = 0; a < n; ++a)
            ph += (static_cast<double>(xq[static_cast<size_t>(q)][static_cast<size_t>(a)]) / x_grid.m()) *
                  (static_cast<double>(nodes[i].K[static_cast<size_t>(a)]) / sigma.grid.m());
          t[static_cast<size_t>(q) * nodes.size() + i] = std::polar(1.0, 2.0 * std::numbers::pi * ph);
        }
      return t;
    };
    const auto ef = table(fn);
    const auto eg = table(gn);
    parallel_for(M, opt.threads, [&](std::int64_t q) {
      const Complex* rf = ef.data() + static_cast<size_t>(q) * fn.size();
      const Complex* rg = eg.data() + static_cast<size_t>(q) * gn.size();
      Complex acc{};
      for (size_t i = 0; i < fn.size(); ++i) {
        Complex s{};
        for (size_t j = 0; j < gn.size(); ++j)
          s += gn[j].wv * sigma.samples[static_cast<size_t>(fn[i].sigma_offset + gn[j].sigma_offset)] * rg[j];
        acc += fn[i].wv * rf[i] * s;
      }
      out.values[static_cast<size_t>(q)] = acc;
    });
    return out;
  }

  const std::int64_t P = static_cast<std::int64_t>(sigma.grid.m()) * x_grid.m();
  std::vector<Complex> phase(static_cast<size_t>(P));
  for (std::int64_t r = 0; r < P; ++r)
    phase[static_cast<size_t>(r)] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(P));
  auto buffer_index = [&](const std::vector<std::int64_t>& K) {
    std::int64_t idx = 0;
    for (int a = 0; a < n; ++a) idx = idx * P + positive_mod(K[static_cast<size_t>(a)], P);
    return idx;
  };
  std::vector<std::int64_t> g_slot(gn.size()), x_slot(static_cast<size_t>(M));
  for (size_t j = 0; j < gn.size(); ++j) g_slot[j] = buffer_index(gn[j].K);
  for (std::int64_t q = 0; q < M; ++q) x_slot[static_cast<size_t>(q)] = buffer_index(xq[static_cast<size_t>(q)]);
  std::vector<std::vector<std::int64_t>> xmod(static_cast<size_t>(M), std::vector<std::int64_t>(static_cast<size_t>(n)));
  for (std::int64_t q = 0; q < M; ++q)
    for (int a = 0; a < n; ++a) xmod[static_cast<size_t>(q)][static_cast<size_t>(a)] = positive_mod(xq[static_cast<size_t>(q)][static_cast<size_t>(a)], P);

  constexpr std::int64_t kChunk = 16;
  const std::int64_t chunks = (static_cast<std::int64_t>(fn.size()) + kChunk - 1) / kChunk;
  std::vector<std::vector<Complex>> partial(static_cast<size_t>(chunks));
  parallel_for(chunks, opt.threads, [&](std::int64_t c) {
    FftPlan plan(std::vector<int>(static_cast<size_t>(n), static_cast<int>(P)), FFTW_BACKWARD);
    auto buf = plan.data();
    std::vector<Complex> acc(static_cast<size_t>(M));
    const std::int64_t end = std::min<std::int64_t>(static_cast<std::int64_t>(fn.size()), (c + 1) * kChunk);
    for (std::int64_t i = c * kChunk; i < end; ++i) {
      const auto& fi = fn[static_cast<size_t>(i)];
      plan.zero();
      for (size_t j = 0; j < gn.size(); ++j)
        buf[static_cast<size_t>(g_slot[j])] += gn[j].wv * sigma.samples[static_cast<size_t>(fi.sigma_offset + gn[j].sigma_offset)];
      plan.execute();
      std::vector<std::int64_t> kmod(static_cast<size_t>(n));
      for (int a = 0; a < n; ++a) kmod[static_cast<size_t>(a)] = positive_mod(fi.K[static_cast<size_t>(a)], P);
      for (std::int64_t q = 0; q < M; ++q) {
        std::int64_t r = 0;
        for (int a = 0; a < n; ++a) r = (r + xmod[static_cast<size_t>(q)][static_cast<size_t>(a)] * kmod[static_cast<size_t>(a)]) % P;
        acc[static_cast<size_t>(q)] += fi.wv * phase[static_cast<size_t>(r)] * buf[static_cast<size_t>(x_slot[static_cast<size_t>(q)])];
      }
    }
    partial[static_cast<size_t>(c)] = std::move(acc);
  });
  for (const auto& p : partial)
    for (std::int64_t q = 0; q < M; ++q) out.values[static_cast<size_t>(q)] += p[static_cast<size_t>(q)];
  return out;
}

/// Even m_x giving at least two samples per unit of the xi + eta frequency range.
inline int default_output_density(const MultiplierField& sigma) {
  const int n = sigma.n();
  double w = 0.0;
  const Box b = sigma.grid.box();
  for (int a = 0; a < n; ++a) w = std::max(w, b[a].width() + b[n + a].width());
  int mx = static_cast<int>(std::ceil(2.0 * w));
  if (mx % 2) ++mx;
  return std::max(8, mx);
}

/// [-(m/2 - 1/2), m/2 - 1/2]^n at density default_output_density: whole unit cubes, inside one output period.
inline GridBox default_output_grid(const MultiplierField& sigma) {
  const double L = 0.5 * sigma.grid.m() - 0.5;
  return GridBox::exact(Box::cube(sigma.n(), -L, L), default_output_density(sigma));
}

/// Fraction of the discrete L^2 mass of T(f, g) inside x_grid relative to the box
/// doubled about its center, capped at one output period.
inline double output_capture(const MultiplierField& sigma, const BandLimitedInput& f, const BandLimitedInput& g,
                             const GridBox& x_grid, const ApplyOptions& opt = {}) {
  const std::int64_t period = static_cast<std::int64_t>(sigma.grid.m()) * x_grid.m();
  std::vector<std::int64_t> lo, hi;
  for (int a = 0; a < x_grid.dim(); ++a) {
    const std::int64_t c2 = x_grid.lo_index(a) + x_grid.hi_index(a);  // twice the center index
    const std::int64_t width = std::min(2 * (x_grid.count(a) - 1), period);
    lo.push_back(detail::floor_div(c2 - width, 2));
    hi.push_back(detail::floor_div(c2 - width, 2) + width);
  }
  const GridBox big(x_grid.m(), lo, hi);
  const double inner = l2_norm(apply_T(sigma, f, g, x_grid, opt));
  const double outer = l2_norm(apply_T(sigma, f, g, big, opt));
  if (outer == 0.0) return 1.0;
  return (inner * inner) / (outer * outer);
}

/// Unit-norm input f^ = sum_mu c_mu psi(xi - mu) on sigma's xi (offset 0) or eta (offset n)
/// grid, psi the standard bump of radius 1/2, c complex Gaussian.
inline BandLimitedInput random_band_limited_input(const MultiplierField& sigma, int offset, std::mt19937_64& rng) {
  const int n = sigma.n();
  const GridBox g = spectral_grid(sigma, offset);
  const Box b = g.box();
  std::vector<int> lo(static_cast<size_t>(n)), hi(static_cast<size_t>(n));
  double radius = 0.5;
  for (int a = 0; a < n; ++a) {
    lo[static_cast<size_t>(a)] = static_cast<int>(std::ceil(b[a].lo + 0.5 - 1e-12));
    hi[static_cast<size_t>(a)] = static_cast<int>(std::floor(b[a].hi - 0.5 + 1e-12));
    if (lo[static_cast<size_t>(a)] > hi[static_cast<size_t>(a)]) {
      lo[static_cast<size_t>(a)] = hi[static_cast<size_t>(a)] = static_cast<int>(std::round(0.5 * (b[a].lo + b[a].hi)));
      radius = std::min(radius, 0.5 * b[a].width());
    }
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> shifts;
  std::vector<Complex> weights;
  for (const auto& mu : lattice_box(lo, hi)) {
    shifts.emplace_back(mu.coords.begin(), mu.coords.end());
    const double re = gauss(rng);
    weights.emplace_back(re, gauss(rng));
  }
  const BumpSpec f = bumps::shift_sum(bumps::standard_scaled(n, 0.0, radius), shifts, weights);
  SampledField s = sample(f, g);
  const double nrm = l2_norm(s);
  if (nrm == 0.0) throw NumericalFailure("random_band_limited_input: zero spectrum");
  for (auto& v : s.values) v /= nrm;
  return BandLimitedInput(std::move(s));
}

struct EmpiricalOptions {
  /// Output grid; default_output_grid(sigma) when empty.
  std::optional<GridBox> x_grid;
  /// Input pairs evaluated after the random trials (e.g. a witness pair).
  std::vector<std::pair<BandLimitedInput, BandLimitedInput>> extra_pairs;
  ApplyOptions apply;
};

struct EmpiricalResult {
  double q = 2.0;
  double value = 0.0;
  /// Index of the maximizing trial; extra pairs follow the random trials.
  int best_trial = -1;
  BandLimitedInput best_f, best_g;
  std::vector<double> per_trial;
};

/// max over trials of ||T(f, g)||_{(L^2, l^q)} / (||f|| ||g||) for every q in qs, sharing the applications.
inline std::vector<EmpiricalResult> empirical_operator_lower(const MultiplierField& sigma, const std::vector<double>& qs,
                                                             int trials, std::uint64_t seed, const EmpiricalOptions& opt = {}) {
  if (trials < 1) throw InvalidArgument("empirical_operator_lower: trials must be >= 1");
  for (double q : qs)
    if (!(q >= 1.0)) throw InvalidArgument("empirical_operator_lower: q must lie in [1, inf]");
  const GridBox xg = opt.x_grid ? *opt.x_grid : default_output_grid(sigma);
  std::vector<EmpiricalResult> res(qs.size());
  for (size_t i = 0; i < qs.size(); ++i) res[i].q = qs[i];

  std::seed_seq seq{static_cast<std::uint64_t>(seed & 0xffffffffu), static_cast<std::uint64_t>(seed >> 32), std::uint64_t{0xe3b1}};
  std::mt19937_64 rng(seq);
  const int total = trials + static_cast<int>(opt.extra_pairs.size());
  for (int t = 0; t < total; ++t) {
    BandLimitedInput f, g;
    if (t < trials) {
      f = random_band_limited_input(sigma, 0, rng);
      g = random_band_limited_input(sigma, sigma.n(), rng);
    } else {
      f = opt.extra_pairs[static_cast<size_t>(t - trials)].first;
      g = opt.extra_pairs[static_cast<size_t>(t - trials)].second;
    }
    const double scale = f.declared_norm * g.declared_norm;
    const SampledField out = scale > 0.0 ? apply_T(sigma, f, g, xg, opt.apply) : SampledField(xg);
    for (auto& r : res) {
      const double v = scale > 0.0 ? amalgam_norm(out, r.q).value / scale : 0.0;
      r.per_trial.push_back(v);
      if (r.best_trial < 0 || v > r.value) {
        r.value = v;
        r.best_trial = t;
        r.best_f = f;
        r.best_g = g;
      }
    }
  }
  return res;
}

inline EmpiricalResult empirical_operator_lower(const MultiplierField& sigma, double q, int trials, std::uint64_t seed,
                                                const EmpiricalOptions& opt = {}) {
  return empirical_operator_lower(sigma, std::vector<double>{q}, trials, seed, opt).front();
}

}  // namespace lbmult
