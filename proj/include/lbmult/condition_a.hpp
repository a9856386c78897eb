// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lbmult/bump.hpp"
#include "lbmult/error.hpp"
#include "lbmult/fft.hpp"
#include "lbmult/grid.hpp"
#include "lbmult/lattice.hpp"

namespace lbmult {

enum class Verdict { holds, fails, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    default: return "inconclusive";
  }
}

struct ConditionAReport {
  Verdict verdict = Verdict::inconclusive;
  GridBox window;
  std::vector<LatticeIndex> translates;
  /// Dual window sampled on `window` (verdict == holds).
  std::optional<SampledField> theta;
  /// Closed form of the same dual window, evaluable on any grid.
  std::optional<BumpSpec> theta_bump;
  /// Coefficients c_alpha over `translates` with c_0 != 0 (verdict == fails).
  std::optional<std::map<LatticeIndex, Complex>> obstruction;
  /// Period of the extended obstruction pattern along each axis.
  std::vector<int> obstruction_period;
  std::vector<double> rank_data;
  int rank = 0;
  int rank_refined = 0;
  /// holds: max_alpha |R(alpha) - delta| at m.  fails: sup of |sum c Phi| on the window.
  double residual = 0.0;
  /// holds: the same residual at 2m.  fails: sup residual of the extended pattern on the enlarged window.
  double residual_refined = 0.0;
  /// Distance of e_0 from the span of the translate moments.
  double null_component = 0.0;
  std::string note;
};

namespace detail {

/// Samples of Phi on the 1/m lattice; integer translates are index shifts.
class TranslateTable {
 public:
  TranslateTable(const BumpSpec& phi, int m) : grid_(GridBox::covering(phi.support(), m)), vals_(sample(phi, grid_)) {}

  /// Phi(x - alpha) where x has global node indices K.
  Complex value(std::span<const std::int64_t> K, const LatticeIndex& alpha) const {
    std::int64_t flat = 0;
    for (int a = 0; a < grid_.dim(); ++a) {
      const std::int64_t k = K[static_cast<size_t>(a)] - static_cast<std::int64_t>(alpha[a]) * grid_.m();
      if (k < grid_.lo_index(a) || k > grid_.hi_index(a)) return {};
      flat += (k - grid_.lo_index(a)) * grid_.stride(a);
    }
    return vals_.values[static_cast<size_t>(flat)];
  }

 private:
  GridBox grid_;
  SampledField vals_;
};

/// Lattice points alpha whose translated support box meets the interior of `window`.
inline std::vector<LatticeIndex> overlapping_translates(const Box& support, const Box& window) {
  const int d = window.dim();
  std::vector<int> lo(static_cast<size_t>(d)), hi(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) {
    lo[static_cast<size_t>(a)] = static_cast<int>(std::floor(window[a].lo - support[a].hi)) + 1;
    hi[static_cast<size_t>(a)] = static_cast<int>(std::ceil(window[a].hi - support[a].lo)) - 1;
    if (lo[static_cast<size_t>(a)] > hi[static_cast<size_t>(a)]) return {};
  }
  std::vector<LatticeIndex> out;
  for (const auto& alpha : lattice_box(lo, hi))
    if (support.translated(alpha).overlaps(window)) out.push_back(alpha);
  return out;
}

inline std::vector<std::int64_t> global_index(const GridBox& g, std::int64_t flat) {
  std::vector<std::int64_t> local;
  g.unflatten(flat, local);
  for (int a = 0; a < g.dim(); ++a) local[static_cast<size_t>(a)] += g.lo_index(a);
  return local;
}

/// Bump spanning the whole window, used as the smooth cutoff for candidate dual windows.
inline BumpSpec window_cutoff(const Box& window) {
  std::vector<double> c, r;
  for (const auto& ax : window.axes) {
    c.push_back(0.5 * (ax.lo + ax.hi));
    r.push_back(0.5 * ax.width());
  }
  return bumps::standard_scaled(c, r);
}

struct TranslateSvd {
  Eigen::VectorXd singular;
  Eigen::MatrixXcd V;  // translate-space singular vectors
  int rank = 0;
};

/// SVD of the weighted translate matrix M(alpha, k) = sqrt(w_k) chi(x_k) Phi(x_k - alpha).
inline TranslateSvd translate_svd(const TranslateTable& tab, const std::vector<LatticeIndex>& translates, const GridBox& g,
                                  const BumpSpec& cutoff, double tol) {
  const auto R = static_cast<Eigen::Index>(translates.size());
  Eigen::MatrixXcd Mt(g.size(), R);
  const SampledField chi = sample(cutoff, g);
  for (std::int64_t k = 0; k < g.size(); ++k) {
    const auto K = global_index(g, k);
    const double s = std::sqrt(g.weight(k)) * chi.values[static_cast<size_t>(k)].real();
    for (Eigen::Index r = 0; r < R; ++r) Mt(k, r) = std::conj(s * tab.value(K, translates[static_cast<size_t>(r)]));
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Mt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TranslateSvd out;
  out.singular = svd.singularValues();
  out.V = svd.matrixV();
  const double smax = out.singular.size() ? out.singular(0) : 0.0;
  for (Eigen::Index j = 0; j < out.singular.size(); ++j)
    if (out.singular(j) > tol * smax) ++out.rank;
  return out;
}

inline std::vector<int> period_residue(const LatticeIndex& alpha, const std::vector<int>& p) {
  std::vector<int> r(p.size());
  for (size_t a = 0; a < p.size(); ++a) r[a] = static_cast<int>(positive_mod(alpha[static_cast<int>(a)], p[a]));
  return r;
}

/// Period vectors in {1..4}^d ordered by product, then lexicographically.
inline std::vector<std::vector<int>> candidate_periods(int d) {
  std::vector<std::vector<int>> all;
  for (const auto& p : lattice_box(std::vector<int>(static_cast<size_t>(d), 1), std::vector<int>(static_cast<size_t>(d), 4)))
    all.push_back(p.coords);
  std::stable_sort(all.begin(), all.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    long pa = 1, pb = 1;
    for (int v : a) pa *= v;
    for (int v : b) pb *= v;
    if (pa != pb) return pa < pb;
    return a < b;
  });
  return all;
}

}  // namespace detail

/// R(alpha) = int Theta(x) Phi(x - alpha) dx for |alpha|_inf <= radius, by trapezoid on theta's grid.
inline std::map<LatticeIndex, Complex> lattice_cross_correlation(const SampledField& theta, const BumpSpec& phi, int radius) {
  const GridBox& g = theta.grid;
  if (g.dim() != phi.dim()) throw DimensionMismatch("lattice_cross_correlation", phi.dim(), g.dim());
  const Box tbox = g.box();
  const auto overlapping = detail::overlapping_translates(phi.support(), tbox);
  for (const auto& a : overlapping)
    if (a.sup_norm() > radius)
      throw InvalidArgument("lattice_cross_correlation: radius " + std::to_string(radius) + " smaller than overlap range " +
                            std::to_string(a.sup_norm()));
  std::map<LatticeIndex, Complex> out;
  for (const auto& alpha : lattice_cube(g.dim(), radius)) out[alpha] = Complex{};
  std::vector<double> x, y;
  for (const auto& alpha : overlapping) {
    Complex s{};
    for (std::int64_t k = 0; k < g.size(); ++k) {
      const Complex t = theta.values[static_cast<size_t>(k)];
      if (t == Complex{}) continue;
      g.point(k, x);
      y.resize(x.size());
      for (size_t a = 0; a < x.size(); ++a) y[a] = x[a] - alpha.coords[a];
      s += g.weight(k) * t * phi(std::span<const double>(y));
    }
    out[alpha] = s;
  }
  return out;
}

inline std::map<LatticeIndex, Complex> lattice_cross_correlation(const BumpSpec& theta, const BumpSpec& phi, int radius, int m) {
  if (theta.dim() != phi.dim()) throw DimensionMismatch("lattice_cross_correlation", phi.dim(), theta.dim());
  return lattice_cross_correlation(sample(theta, GridBox::covering(theta.support(), m)), phi, radius);
}

/// Largest |alpha|_inf with supp Phi(. - alpha) meeting supp Theta.
inline int overlap_radius(const Box& theta_support, const Box& phi_support) {
  int r = 0;
  for (const auto& a : detail::overlapping_translates(phi_support, theta_support)) r = std::max(r, a.sup_norm());
  return r;
}

/// Window-restricted numerical test of condition (A) for Phi.
///
/// The translates meeting the open `window` are sampled on the 1/m grid with weights
/// sqrt(w_k) chi(x_k), chi the standard bump stretched over the window. If e_0 lies in
/// the span of their moment vectors the minimum-norm dual
///   Theta(x) = chi(x)^2 sum_beta y_beta conj(Phi(x - beta)),  G y = e_0,
/// is returned. Otherwise periodic coefficient patterns are tried on the window grown by
/// one unit per side; a pattern that annihilates every translate there is reported as
/// an obstruction.
inline ConditionAReport check_condition_a(const BumpSpec& phi, const Box& window, int m, double tol = 1e-8) {
  const int d = phi.dim();
  if (window.dim() != d) throw DimensionMismatch("check_condition_a", d, window.dim());
  if (m < 32) throw InvalidArgument("check_condition_a: m must be >= 32");
  if (!(tol > 0.0)) throw InvalidArgument("check_condition_a: tol must be positive");
  for (const auto& ax : window.axes) {
    if (!(ax.lo < ax.hi)) throw InvalidArgument("check_condition_a: empty window");
    if (std::abs(2.0 * ax.lo - std::round(2.0 * ax.lo)) > 1e-12 || std::abs(2.0 * ax.hi - std::round(2.0 * ax.hi)) > 1e-12)
      throw InvalidArgument("check_condition_a: window endpoints must be half-integers");
  }

  ConditionAReport rep;
  rep.window = GridBox::exact(window, m);
  rep.translates = detail::overlapping_translates(phi.support(), window);
  if (rep.translates.empty()) throw InvalidArgument("check_condition_a: window too small (no translate overlaps)");

  const BumpSpec chi = detail::window_cutoff(window);
  const detail::TranslateTable tab(phi, m);
  const auto svd = detail::translate_svd(tab, rep.translates, rep.window, chi, tol);
  rep.rank = svd.rank;
  rep.rank_data.assign(svd.singular.data(), svd.singular.data() + svd.singular.size());
  {
    const GridBox fine = GridBox::exact(window, 2 * m);
    const detail::TranslateTable tab2(phi, 2 * m);
    rep.rank_refined = detail::translate_svd(tab2, rep.translates, fine, chi, tol).rank;
  }
  if (rep.rank != rep.rank_refined)
    throw NumericalFailure("check_condition_a: rank unstable under refinement (" + std::to_string(rep.rank) + " at m=" +
                           std::to_string(m) + ", " + std::to_string(rep.rank_refined) + " at 2m)");

  const auto R = static_cast<Eigen::Index>(rep.translates.size());
  const auto zero_it = std::find(rep.translates.begin(), rep.translates.end(), LatticeIndex::zero(d));
  if (zero_it == rep.translates.end()) {
    rep.note = "supp Phi does not meet the window; enlarge or recenter it";
    return rep;
  }
  const Eigen::Index i0 = zero_it - rep.translates.begin();
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(R);
  e0(i0) = 1.0;
  const Eigen::MatrixXcd Vr = svd.V.leftCols(rep.rank);
  const Eigen::VectorXcd in_range = Vr * (Vr.adjoint() * e0);
  rep.null_component = (e0 - in_range).norm();

  if (rep.null_component <= tol) {
    Eigen::VectorXcd coef = Vr.adjoint() * e0;
    for (Eigen::Index j = 0; j < rep.rank; ++j) coef(j) /= svd.singular(j) * svd.singular(j);
    const Eigen::VectorXcd y = Vr * coef;
    std::vector<Complex> yv(y.data(), y.data() + y.size());
    rep.theta_bump = BumpSpec(
        window,
        [phi, chi, yv, tr = rep.translates](std::span<const double> x) {
          const double c = chi(x).real();
          if (c == 0.0) return Complex{};
          Complex s{};
          std::vector<double> z(x.size());
          for (size_t b = 0; b < tr.size(); ++b) {
            for (size_t a = 0; a < x.size(); ++a) z[a] = x[a] - tr[b].coords[a];
            s += yv[b] * std::conj(phi(std::span<const double>(z)));
          }
          return c * c * s;
        },
        phi.real_valued(), "dual_window");
    rep.theta = sample(*rep.theta_bump, rep.window);
    const int radius = overlap_radius(window, phi.support());
    auto residual_of = [&](const std::map<LatticeIndex, Complex>& Rm) {
      double r = 0.0;
      for (const auto& [alpha, v] : Rm) r = std::max(r, std::abs(v - (alpha.sup_norm() == 0 ? 1.0 : 0.0)));
      return r;
    };
    rep.residual = residual_of(lattice_cross_correlation(*rep.theta, phi, radius));
    rep.residual_refined = residual_of(lattice_cross_correlation(*rep.theta_bump, phi, radius, 2 * m));
    rep.verdict = Verdict::holds;
    return rep;
  }

  // Candidate relation on the window itself.
  {
    Eigen::VectorXcd c = e0 - in_range;
    const double cmax = c.cwiseAbs().maxCoeff();
    std::map<LatticeIndex, Complex> obs;
    for (Eigen::Index r = 0; r < R; ++r) obs[rep.translates[static_cast<size_t>(r)]] = std::conj(c(r)) / cmax;
    double res = 0.0;
    for (std::int64_t k = 0; k < rep.window.size(); ++k) {
      const auto K = detail::global_index(rep.window, k);
      Complex s{};
      for (const auto& [alpha, v] : obs) s += v * tab.value(K, alpha);
      res = std::max(res, std::abs(s));
    }
    rep.obstruction = obs;
    rep.residual = res;
  }

  // Periodic extension on the enlarged window.
  Box big = window;
  for (auto& ax : big.axes) {
    ax.lo -= 1.0;
    ax.hi += 1.0;
  }
  const GridBox bg = GridBox::exact(big, m);
  const auto big_translates = detail::overlapping_translates(phi.support(), big);
  std::vector<std::vector<std::int64_t>> nodes(static_cast<size_t>(bg.size()));
  for (std::int64_t k = 0; k < bg.size(); ++k) nodes[static_cast<size_t>(k)] = detail::global_index(bg, k);

  for (const auto& p : detail::candidate_periods(d)) {
    std::map<std::vector<int>, Eigen::Index> cls;
    std::vector<int> last = p;
    for (int& v : last) --v;
    for (const auto& r : lattice_box(std::vector<int>(static_cast<size_t>(d), 0), last))
      cls.emplace(r.coords, static_cast<Eigen::Index>(cls.size()));
    const auto C = static_cast<Eigen::Index>(cls.size());
    Eigen::MatrixXcd Rt = Eigen::MatrixXcd::Zero(bg.size(), C);
    for (const auto& alpha : big_translates) {
      const Eigen::Index c = cls.at(detail::period_residue(alpha, p));
      for (std::int64_t k = 0; k < bg.size(); ++k) Rt(k, c) += std::conj(tab.value(nodes[static_cast<size_t>(k)], alpha));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_p(Rt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd_p.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index j = 0; j < s.size(); ++j)
      if (s(j) > tol * smax) ++rank;
    if (rank == C) continue;
    const Eigen::MatrixXcd Vn = svd_p.matrixV().rightCols(C - rank);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(C);
    e(cls.at(std::vector<int>(static_cast<size_t>(d), 0))) = 1.0;
    Eigen::VectorXcd c = Vn * (Vn.adjoint() * e);
    if (!(std::abs(c(0)) > tol * c.norm())) continue;
    c /= c.cwiseAbs().maxCoeff();
    std::vector<Complex> pattern(static_cast<size_t>(C));
    for (Eigen::Index j = 0; j < C; ++j) pattern[static_cast<size_t>(j)] = std::conj(c(j));

    double res_big = 0.0;
    for (std::int64_t k = 0; k < bg.size(); ++k) {
      Complex acc{};
      for (const auto& alpha : big_translates)
        acc += pattern[static_cast<size_t>(cls.at(detail::period_residue(alpha, p)))] * tab.value(nodes[static_cast<size_t>(k)], alpha);
      res_big = std::max(res_big, std::abs(acc));
    }
    if (res_big > tol) continue;

    std::map<LatticeIndex, Complex> obs;
    double res = 0.0;
    for (const auto& alpha : rep.translates) obs[alpha] = pattern[static_cast<size_t>(cls.at(detail::period_residue(alpha, p)))];
    for (std::int64_t k = 0; k < rep.window.size(); ++k) {
      const auto K = detail::global_index(rep.window, k);
      Complex acc{};
      for (const auto& [alpha, v] : obs) acc += v * tab.value(K, alpha);
      res = std::max(res, std::abs(acc));
    }
    rep.obstruction = obs;
    rep.obstruction_period = p;
    rep.residual = res;
    rep.residual_refined = res_big;
    rep.verdict = Verdict::fails;
    return rep;
  }
  rep.note = "no periodic relation extends beyond the window; try a larger window";
  return rep;
}

}  // namespace lbmult
