// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "lbmult/bump.hpp"
#include "lbmult/error.hpp"
#include "lbmult/fourier.hpp"
#include "lbmult/grid.hpp"
#include "lbmult/lattice.hpp"
#include "lbmult/multiplier.hpp"
#include "lbmult/trilinear.hpp"

namespace lbmult {

/// Refuse kits whose |F^{-1} theta| gets this close to zero on Q.
inline constexpr double kMinC0 = 1e-6;

/// theta = tensor power of b(4t) (support [-1/4, 1/4]^n), phi = plateau equal to 1 on
/// [-1/4, 1/4]^n and 0 outside Q = [-1/2, 1/2]^n, Phi = phi (x) phi.
class WitnessKit {
 public:
  explicit WitnessKit(int n = 1, int c0_m = 64, int freq_density = 4096)
      : n_(n), freq_density_(freq_density), cache_(std::make_shared<Cache>()) {
    if (n < 1) throw InvalidArgument("WitnessKit: n must be >= 1");
    theta_ = bumps::standard_scaled(n, 0.0, 0.25);
    phi_ = bumps::plateau(Box::cube(n, -0.25, 0.25), Box::cube(n, -0.5, 0.5));
    Phi_ = bumps::tensor({phi_, phi_});
    theta_l2_ = l2_norm(sample(theta_, GridBox::covering(theta_.support(), freq_density_)));
    const SampledField& ft = inverse_theta(c0_m);
    c0_ = std::abs(ft.values.front());
    for (const auto& v : ft.values) c0_ = std::min(c0_, std::abs(v));
    c0_m_ = c0_m;
    if (!(c0_ > kMinC0)) throw NumericalFailure("WitnessKit: c0 = " + message_number(c0_) + " below threshold");
  }

  int n() const { return n_; }
  const BumpSpec& theta() const { return theta_; }
  const BumpSpec& phi() const { return phi_; }
  const BumpSpec& Phi() const { return Phi_; }
  /// min over the Q grid of |F^{-1} theta|.
  double c0() const { return c0_; }
  int c0_grid() const { return c0_m_; }
  double theta_l2() const { return theta_l2_; }
  /// c0^2 / ||theta||^2: since ||h|| <= c0^{-2} and ||f|| = ||g|| = ||theta||, the
  /// certificate is at least kappa times the witnessed trilinear value.
  double kappa() const { return c0_ * c0_ / (theta_l2_ * theta_l2_); }

  /// F^{-1} theta on the Q grid at density m; computed once per m.
  const SampledField& inverse_theta(int m) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->fields.find(m);
    if (it == cache_->fields.end()) {
      const GridBox q = GridBox::exact(Box::cube(n_, -0.5, 0.5), m);
      it = cache_->fields.emplace(m, std::make_shared<const SampledField>(inverse_fourier(theta_, q, freq_density_))).first;
    }
    return *it->second;
  }

 private:
  struct Cache {
    std::mutex mu;
    std::map<int, std::shared_ptr<const SampledField>> fields;
  };

  int n_;
  int freq_density_;
  BumpSpec theta_, phi_, Phi_;
  double c0_ = 0.0;
  int c0_m_ = 0;
  double theta_l2_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

namespace detail {

inline void check_unit(const LatticeSequence& s, int n, const char* what) {
  if (s.dim() != n) throw DimensionMismatch(what, n, s.dim());
  if (std::abs(s.norm() - 1.0) > 1e-10) throw InvalidArgument(std::string(what) + ": sequence must have unit l^2 norm");
}

/// Smallest half-integer box containing supp S + [-1/2, 1/2]^n.
inline Box support_box(const LatticeSequence& s) {
  Box b;
  bool first = true;
  for (const auto& [k, v] : s.values()) {
    Box c = Box::cube(s.dim(), -0.5, 0.5).translated(k);
    b = first ? c : b.hull(c);
    first = false;
  }
  return b;
}

/// sum_mu S(mu) theta(xi - mu) on the 1/m grid over support_box(S).
inline BandLimitedInput theta_train(const WitnessKit& kit, const LatticeSequence& S, int m) {
  const int n = kit.n();
  const GridBox g = GridBox::exact(support_box(S), m);
  const GridBox tg = GridBox::covering(kit.theta().support(), m);
  const SampledField ts = sample(kit.theta(), tg);
  SampledField out(g);
  std::vector<std::int64_t> local, tgt(static_cast<size_t>(n));
  for (const auto& [mu, c] : S.values()) {
    for (std::int64_t k = 0; k < tg.size(); ++k) {
      tg.unflatten(k, local);
      bool inside = true;
      for (int a = 0; a < n; ++a) {
        const std::int64_t K = tg.lo_index(a) + local[static_cast<size_t>(a)] + static_cast<std::int64_t>(mu[a]) * m;
        if (K < g.lo_index(a) || K > g.hi_index(a)) {
          inside = false;
          break;
        }
        tgt[static_cast<size_t>(a)] = K - g.lo_index(a);
      }
      if (inside) out.values[static_cast<size_t>(g.flatten(tgt))] += c * ts.values[static_cast<size_t>(k)];
    }
  }
  return BandLimitedInput(std::move(out));
}

}  // namespace detail

/// f^ = sum F(mu) theta(. - mu), g^ = sum G(nu) theta(. - nu) on 1/m grids.
inline std::pair<BandLimitedInput, BandLimitedInput> build_witness_inputs(const WitnessKit& kit, const LatticeSequence& F,
                                                                          const LatticeSequence& G, int m) {
  detail::check_unit(F, kit.n(), "build_witness_inputs (F)");
  detail::check_unit(G, kit.n(), "build_witness_inputs (G)");
  if (m < 2 || m % 2) throw InvalidArgument("build_witness_inputs: m must be even");
  return {detail::theta_train(kit, F, m), detail::theta_train(kit, G, m)};
}

struct DualFunction {
  SampledField h;
  double l2 = 0.0;
};

/// h = (sum_rho H(rho) e^{-2 pi i rho.x}) / (F^{-1} theta)^2 on the Q grid at density m.
inline DualFunction build_h(const WitnessKit& kit, const LatticeSequence& H, int m) {
  detail::check_unit(H, kit.n(), "build_h (H)");
  if (m < 2 || m % 2) throw InvalidArgument("build_h: m must be even");
  if (!(kit.c0() > kMinC0)) throw NumericalFailure("build_h: c0 below threshold");
  const SampledField& ft = kit.inverse_theta(m);
  DualFunction out{SampledField(ft.grid), 0.0};
  std::vector<double> x;
  for (std::int64_t i = 0; i < ft.grid.size(); ++i) {
    const Complex d = ft.values[static_cast<size_t>(i)];
    if (!(std::abs(d) > kMinC0)) throw NumericalFailure("build_h: |F^{-1} theta| below threshold on the grid");
    ft.grid.point(i, x);
    Complex s{};
    for (const auto& [rho, c] : H.values()) {
      double ph = 0.0;
      for (int a = 0; a < kit.n(); ++a) ph += rho[a] * x[static_cast<size_t>(a)];
      s += c * std::polar(1.0, -2.0 * std::numbers::pi * ph);
    }
    out.h.values[static_cast<size_t>(i)] = s / (d * d);
  }
  out.l2 = l2_norm(out.h);
  return out;
}

namespace detail {

/// T(f, g) on the Q grid at density x_m for the witness inputs built from F, G.
struct WitnessOutput {
  BandLimitedInput f, g;
  SampledField T;
};

inline WitnessOutput witness_output(const LatticeMatrix& A, const WitnessKit& kit, const LatticeSequence& F,
                                    const LatticeSequence& G, int m, int x_m, const ApplyOptions& opt) {
  auto [f, g] = build_witness_inputs(kit, F, G, m);
  const Box fb = f.spectrum.grid.box(), gb = g.spectrum.grid.box();
  const MultiplierField sigma = assemble_sigma(A, kit.Phi(), m, fb.product(gb));
  const GridBox q = GridBox::exact(Box::cube(kit.n(), -0.5, 0.5), x_m);
  SampledField T = apply_T(sigma, f, g, q, opt);
  return {std::move(f), std::move(g), std::move(T)};
}

inline Complex pair_with(const SampledField& T, const SampledField& h) {
  SampledField p(T.grid);
  for (size_t i = 0; i < p.values.size(); ++i) p.values[i] = T.values[i] * h.values[i];
  return quad(p);
}

}  // namespace detail

/// int_Q T_{sigma_{A,Phi}}(f, g) h dx with f, g, h built from F, G, H; x_m = 0 uses m.
inline Complex pairing(const LatticeMatrix& A, const WitnessKit& kit, const LatticeSequence& F, const LatticeSequence& G,
                       const LatticeSequence& H, int m, int x_m = 0, const ApplyOptions& opt = {}) {
  if (A.dim() != kit.n()) throw DimensionMismatch("pairing", kit.n(), A.dim());
  detail::check_unit(H, kit.n(), "pairing (H)");
  if (x_m == 0) x_m = m;
  if (A.empty()) {
    detail::check_unit(F, kit.n(), "pairing (F)");
    detail::check_unit(G, kit.n(), "pairing (G)");
    return {};
  }
  const auto w = detail::witness_output(A, kit, F, G, m, x_m, opt);
  return detail::pair_with(w.T, build_h(kit, H, x_m).h);
}

struct Certificate {
  /// ||T(f, g)||_{L^2(Q)} / (||f|| ||g||).
  double value = 0.0;
  Complex pairing{};
  double h_l2 = 0.0;
  double f_norm = 0.0;
  double g_norm = 0.0;
  /// |pairing| / (||h|| ||f|| ||g||); value >= cs_floor by Cauchy-Schwarz.
  double cs_floor = 0.0;
};

/// Lower bound for the (L^2, l^inf) multiplier norm from the witness triple of `est`.
inline Certificate lower_bound_certificate(const LatticeMatrix& A, const WitnessKit& kit, const TrilinearEstimate& est, int m,
                                           int x_m = 0, const ApplyOptions& opt = {}) {
  if (x_m == 0) x_m = m;
  Certificate c;
  if (A.empty() || est.witness.F.empty()) return c;
  const auto w = detail::witness_output(A, kit, est.witness.F, est.witness.G, m, x_m, opt);
  const DualFunction h = build_h(kit, est.witness.H, x_m);
  c.f_norm = w.f.declared_norm;
  c.g_norm = w.g.declared_norm;
  c.h_l2 = h.l2;
  c.pairing = detail::pair_with(w.T, h.h);
  c.value = l2_norm(w.T) / (c.f_norm * c.g_norm);
  c.cs_floor = std::abs(c.pairing) / (c.h_l2 * c.f_norm * c.g_norm);
  if (c.value < c.cs_floor * (1.0 - 1e-12))
    throw NumericalFailure("lower_bound_certificate: Cauchy-Schwarz floor violated");
  return c;
}

/// The witness pair of `est` as unit-norm inputs on the 1/m grid.
inline std::pair<BandLimitedInput, BandLimitedInput> witness_pair(const WitnessKit& kit, const TrilinearEstimate& est, int m) {
  auto [f, g] = build_witness_inputs(kit, est.witness.F, est.witness.G, m);
  return {f.scaled(1.0 / f.declared_norm), g.scaled(1.0 / g.declared_norm)};
}

/// a_{mu,nu} alpha_mu alpha'_nu for 0/1 sequences alpha, alpha'.
inline LatticeMatrix mask_matrix(const LatticeMatrix& A, const LatticeSequence& alpha, const LatticeSequence& alpha_prime) {
  for (const auto* s : {&alpha, &alpha_prime}) {
    if (s->dim() != A.dim()) throw DimensionMismatch("mask_matrix", A.dim(), s->dim());
    for (const auto& [k, v] : s->values())
      if (v != Complex(0.0) && v != Complex(1.0)) throw InvalidArgument("mask_matrix: mask entries must be 0 or 1");
  }
  std::vector<LatticeMatrix::Entry> out;
  for (const auto& [key, a] : A.entries())
    if (alpha(key.first) == Complex(1.0) && alpha_prime(key.second) == Complex(1.0)) out.push_back({key.first, key.second, a});
  return LatticeMatrix(A.dim(), out);
}

using SigmaFamily = std::map<std::pair<LatticeIndex, LatticeIndex>, SampledField>;

/// b_{mu,nu} = quadrature integral of sigma_{mu,nu}, each supported in (mu, nu) + KQ x KQ.
inline LatticeMatrix average_matrix(const SigmaFamily& family, int m, double K) {
  if (!(K > 0.0)) throw InvalidArgument("average_matrix: K must be positive");
  if (family.empty()) return LatticeMatrix(1);
  const int n = family.begin()->first.first.dim();
  std::vector<LatticeMatrix::Entry> out;
  std::vector<double> x;
  for (const auto& [key, field] : family) {
    if (key.first.dim() != n || key.second.dim() != n) throw DimensionMismatch("average_matrix (index)", n, key.second.dim());
    if (field.grid.dim() != 2 * n) throw DimensionMismatch("average_matrix (field)", 2 * n, field.grid.dim());
    if (field.grid.m() != m) throw IncommensurateGrid("average_matrix: field spacing differs from 1/" + std::to_string(m));
    for (std::int64_t i = 0; i < field.grid.size(); ++i) {
      if (field.values[static_cast<size_t>(i)] == Complex{}) continue;
      field.grid.point(i, x);
      for (int a = 0; a < 2 * n; ++a) {
        const double c = a < n ? key.first[a] : key.second[a - n];
        if (std::abs(x[static_cast<size_t>(a)] - c) > 0.5 * K + 1e-12)
          throw InvalidArgument("average_matrix: support of sigma_" + key.first.to_string() + key.second.to_string() +
                                " leaves (mu, nu) + KQ x KQ");
      }
    }
    out.push_back({key.first, key.second, quad(field)});
  }
  return LatticeMatrix(n, out);
}

/// sigma_{mu,nu}(xi, eta) = Theta(xi - mu, eta - nu) sigma_{A,Phi}(xi, eta) for (mu, nu) in supp A.
inline SigmaFamily recovery_family(const MultiplierField& sigma, const BumpSpec& Theta) {
  const int d = sigma.grid.dim();
  if (Theta.dim() != d) throw DimensionMismatch("recovery_family", d, Theta.dim());
  const int m = sigma.grid.m();
  const GridBox tg = GridBox::covering(Theta.support(), m);
  const SampledField ts = sample(Theta, tg);
  SigmaFamily out;
  std::vector<std::int64_t> local, sg(static_cast<size_t>(d));
  for (const auto& [key, a] : sigma.A.entries()) {
    std::vector<std::int64_t> lo, hi;
    std::vector<std::int64_t> shift;
    for (int ax = 0; ax < d; ++ax) {
      const std::int64_t s = static_cast<std::int64_t>(ax < sigma.n() ? key.first[ax] : key.second[ax - sigma.n()]) * m;
      shift.push_back(s);
      lo.push_back(tg.lo_index(ax) + s);
      hi.push_back(tg.hi_index(ax) + s);
    }
    SampledField f(GridBox(m, lo, hi));
    for (std::int64_t k = 0; k < tg.size(); ++k) {
      const Complex t = ts.values[static_cast<size_t>(k)];
      if (t == Complex{}) continue;
      tg.unflatten(k, local);
      bool inside = true;
      for (int ax = 0; ax < d; ++ax) {
        const std::int64_t K = tg.lo_index(ax) + local[static_cast<size_t>(ax)] + shift[static_cast<size_t>(ax)];
        if (K < sigma.grid.lo_index(ax) || K > sigma.grid.hi_index(ax)) {
          inside = false;
          break;
        }
        sg[static_cast<size_t>(ax)] = K - sigma.grid.lo_index(ax);
      }
      if (inside) f.values[static_cast<size_t>(k)] = t * sigma.samples[static_cast<size_t>(sigma.grid.flatten(sg))];
    }
    out.emplace(key, std::move(f));
  }
  return out;
}

}  // namespace lbmult
