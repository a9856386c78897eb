// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "lbmult/error.hpp"
#include "lbmult/lattice.hpp"
#include "lbmult/parallel.hpp"

namespace lbmult {

/// sum_{mu,nu} a_{mu,nu} F(mu) G(nu) H(mu+nu), evaluated exactly over supp A.
inline Complex trilinear_value(const LatticeMatrix& A, const LatticeSequence& F, const LatticeSequence& G,
                               const LatticeSequence& H) {
  const int n = A.dim();
  if (F.dim() != n) throw DimensionMismatch("trilinear_value (F)", n, F.dim());
  if (G.dim() != n) throw DimensionMismatch("trilinear_value (G)", n, G.dim());
  if (H.dim() != n) throw DimensionMismatch("trilinear_value (H)", n, H.dim());
  Complex s{};
  for (const auto& [key, a] : A.entries()) {
    const Complex f = F(key.first);
    if (f == Complex{}) continue;
    const Complex g = G(key.second);
    if (g == Complex{}) continue;
    s += a * f * g * H(key.first + key.second);
  }
  return s;
}

/// Unit l^2 triple together with |sum a F G H| for the matrix it witnesses.
struct WitnessTriple {
  LatticeSequence F{1};
  LatticeSequence G{1};
  LatticeSequence H{1};
  double value = 0.0;
};

/// Lower/upper sandwich for ||A||_B.
struct TrilinearEstimate {
  double lower = 0.0;
  WitnessTriple witness;
  double upper = 0.0;
  int restarts_used = 0;
  bool converged = true;
};

namespace detail {

/// Dense re-indexing of A: rows = distinct mu, cols = distinct nu, sums = distinct mu+nu.
struct TrilinearProblem {
  struct Term {
    int row;
    int col;
    int sum;
    Complex a;
  };

  int n = 1;
  std::vector<LatticeIndex> rows, cols, sums;
  std::vector<Term> terms;

  explicit TrilinearProblem(const LatticeMatrix& A) : n(A.dim()) {
    std::map<LatticeIndex, int> r, c, s;
    for (const auto& [key, a] : A.entries()) {
      r.emplace(key.first, 0);
      c.emplace(key.second, 0);
      s.emplace(key.first + key.second, 0);
    }
    auto number = [](std::map<LatticeIndex, int>& m, std::vector<LatticeIndex>& out) {
      int i = 0;
      for (auto& [k, v] : m) {
        v = i++;
        out.push_back(k);
      }
    };
    number(r, rows);
    number(c, cols);
    number(s, sums);
    for (const auto& [key, a] : A.entries())
      terms.push_back({r.at(key.first), c.at(key.second), s.at(key.first + key.second), a});
  }

  Complex value(const std::vector<Complex>& F, const std::vector<Complex>& G, const std::vector<Complex>& H) const {
    Complex v{};
    for (const auto& t : terms)
      v += t.a * F[static_cast<size_t>(t.row)] * G[static_cast<size_t>(t.col)] * H[static_cast<size_t>(t.sum)];
    return v;
  }

  LatticeSequence to_sequence(const std::vector<LatticeIndex>& idx, const std::vector<Complex>& v) const {
    LatticeSequence s(n);
    for (size_t i = 0; i < idx.size(); ++i) s.set(idx[i], v[i]);
    return s;
  }
};

inline double vec_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

inline void normalize(std::vector<Complex>& v) {
  const double nrm = vec_norm(v);
  for (auto& x : v) x /= nrm;
}

inline std::vector<Complex> random_unit(std::mt19937_64& rng, size_t len, bool complex_phase) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> v(len);
  for (auto& x : v) {
    const double re = g(rng);
    x = complex_phase ? Complex(re, g(rng)) : Complex(re, 0.0);
  }
  if (vec_norm(v) == 0.0) v[0] = 1.0;
  normalize(v);
  return v;
}

}  // namespace detail

/// Options for the alternating ascent estimator.
struct AscentOptions {
  int restarts = 32;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  int max_iterations = 10000;
  int threads = 1;
  /// Called after every coordinate update with (restart, step, current value).
  std::function<void(int, int, double)> observer;
};

/// Best value reached by one restart of the alternating maximization.
struct AscentRun {
  double value = 0.0;
  std::vector<Complex> F, G, H;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

/// One restart: with two of (F, G, H) fixed the objective is linear in the third, so
/// the maximizing unit vector is the normalized conjugate of the induced coefficients.
inline AscentRun ascend(const TrilinearProblem& P, std::vector<Complex> F, std::vector<Complex> G,
                        std::vector<Complex> H, const AscentOptions& opt, int restart) {
  AscentRun run;
  double value = std::abs(P.value(F, G, H));
  int step = 0;
  if (opt.observer) opt.observer(restart, step, value);

  // Returns false when the induced coefficient vector vanishes.
  auto update = [&](int which) {
    std::vector<Complex> coef(which == 0 ? F.size() : which == 1 ? G.size() : H.size());
    for (const auto& t : P.terms) {
      const size_t r = static_cast<size_t>(t.row), c = static_cast<size_t>(t.col), s = static_cast<size_t>(t.sum);
      if (which == 0) coef[r] += t.a * G[c] * H[s];
      else if (which == 1) coef[c] += t.a * F[r] * H[s];
      else coef[s] += t.a * F[r] * G[c];
    }
    const double nrm = vec_norm(coef);
    if (nrm == 0.0) return false;
    for (auto& x : coef) x = std::conj(x) / nrm;
    (which == 0 ? F : which == 1 ? G : H) = std::move(coef);
    value = std::max(value, nrm);
    return true;
  };

  bool stalled = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double before = value;
    for (int which = 0; which < 3 && !stalled; ++which) {
      if (!update(which)) {
        stalled = true;
        break;
      }
      if (opt.observer) opt.observer(restart, ++step, value);
    }
    run.iterations = it + 1;
    if (stalled) {
      run.converged = true;
      break;
    }
    if (value - before <= opt.tol * std::max(value, 1e-300)) {
      run.converged = true;
      break;
    }
  }
  run.value = std::abs(P.value(F, G, H));
  run.F = std::move(F);
  run.G = std::move(G);
  run.H = std::move(H);
  return run;
}

}  // namespace detail

/// min of the three Cauchy-Schwarz bounds: l^2 norms of the row, column and
/// anti-diagonal (mu+nu = tau) suprema of |a_{mu,nu}|.
inline double bnorm_upper(const LatticeMatrix& A) {
  if (A.empty()) return 0.0;
  std::map<LatticeIndex, double> row, col, fiber;
  for (const auto& [key, a] : A.entries()) {
    const double v = std::abs(a);
    auto bump = [v](std::map<LatticeIndex, double>& m, const LatticeIndex& k) {
      auto [it, inserted] = m.emplace(k, v);
      if (!inserted) it->second = std::max(it->second, v);
    };
    bump(row, key.first);
    bump(col, key.second);
    bump(fiber, key.first + key.second);
  }
  auto l2 = [](const std::map<LatticeIndex, double>& m) {
    double s = 0.0;
    for (const auto& [k, v] : m) s += v * v;
    return std::sqrt(s);
  };
  return std::min({l2(row), l2(col), l2(fiber)});
}

/// Multi-restart alternating ascent for ||A||_B.
///
/// Runs `restarts` seeded random complex starts plus one nonnegative start. For an
/// entrywise nonnegative A the nonnegative start keeps every iterate nonnegative. The
/// reported witness is the best restart, ties broken by restart index.
inline TrilinearEstimate bnorm_ascent(const LatticeMatrix& A, const AscentOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw InvalidArgument("bnorm_ascent: tol must be positive");
  if (opt.restarts < 1) throw InvalidArgument("bnorm_ascent: restarts must be >= 1");
  TrilinearEstimate est;
  est.witness.F = LatticeSequence(A.dim());
  est.witness.G = LatticeSequence(A.dim());
  est.witness.H = LatticeSequence(A.dim());
  if (A.empty()) return est;

  const detail::TrilinearProblem P(A);
  const int total = opt.restarts + 1;
  std::vector<AscentRun> runs(static_cast<size_t>(total));
  parallel_for(total, opt.threads, [&](std::int64_t r) {
    std::vector<Complex> F, G, H;
    if (r < opt.restarts) {
      std::seed_seq seq{static_cast<std::uint64_t>(opt.seed & 0xffffffffu), static_cast<std::uint64_t>(opt.seed >> 32),
                        static_cast<std::uint64_t>(r), std::uint64_t{0x5eed}};
      std::mt19937_64 rng(seq);
      F = detail::random_unit(rng, P.rows.size(), true);
      G = detail::random_unit(rng, P.cols.size(), true);
      H = detail::random_unit(rng, P.sums.size(), true);
    } else {
      F.assign(P.rows.size(), 1.0 / std::sqrt(static_cast<double>(P.rows.size())));
      G.assign(P.cols.size(), 1.0 / std::sqrt(static_cast<double>(P.cols.size())));
      H.assign(P.sums.size(), 1.0 / std::sqrt(static_cast<double>(P.sums.size())));
    }
    runs[static_cast<size_t>(r)] = detail::ascend(P, std::move(F), std::move(G), std::move(H), opt, static_cast<int>(r));
  });

  size_t best = 0;
  for (size_t r = 1; r < runs.size(); ++r)
    if (runs[r].value > runs[best].value) best = r;

  est.witness.F = P.to_sequence(P.rows, runs[best].F);
  est.witness.G = P.to_sequence(P.cols, runs[best].G);
  est.witness.H = P.to_sequence(P.sums, runs[best].H);
  est.witness.value = std::abs(trilinear_value(A, est.witness.F, est.witness.G, est.witness.H));
  est.lower = est.witness.value;
  est.upper = bnorm_upper(A);
  est.restarts_used = total;
  est.converged = runs[best].converged;
  return est;
}

inline TrilinearEstimate bnorm_ascent(const LatticeMatrix& A, int restarts, std::uint64_t seed, double tol) {
  AscentOptions opt;
  opt.restarts = restarts;
  opt.seed = seed;
  opt.tol = tol;
  return bnorm_ascent(A, opt);
}

/// Largest total support (rows + cols + sums) accepted by bnorm_oracle.
inline constexpr size_t kOracleMaxSupport = 12;

/// Brute-force floor for ||A||_B on tiny instances.
///
/// Draws `budget` points uniformly on the product of unit spheres (alternating real and
/// complex draws), then polishes the eight best with a shrinking-step random-perturbation
/// hill climb. Shares no code path with bnorm_ascent beyond the index bookkeeping.
inline double bnorm_oracle(const LatticeMatrix& A, std::int64_t budget, std::uint64_t seed) {
  if (A.empty()) return 0.0;
  const detail::TrilinearProblem P(A);
  const size_t support = P.rows.size() + P.cols.size() + P.sums.size();
  if (support > kOracleMaxSupport)
    throw InvalidArgument("bnorm_oracle: instance too large (support " + std::to_string(support) + " > " +
                          std::to_string(kOracleMaxSupport) + ")");
  if (budget < 1) throw InvalidArgument("bnorm_oracle: budget must be >= 1");

  std::seed_seq seq{static_cast<std::uint64_t>(seed & 0xffffffffu), static_cast<std::uint64_t>(seed >> 32), std::uint64_t{0x0c1e}};
  std::mt19937_64 rng(seq);

  struct Point {
    double value;
    std::vector<Complex> F, G, H;
  };
  constexpr size_t kKeep = 8;
  std::vector<Point> best;
  for (std::int64_t s = 0; s < budget; ++s) {
    const bool cplx = (s % 2) == 0;
    Point p{0.0, detail::random_unit(rng, P.rows.size(), cplx), detail::random_unit(rng, P.cols.size(), cplx),
            detail::random_unit(rng, P.sums.size(), cplx)};
    p.value = std::abs(P.value(p.F, p.G, p.H));
    if (best.size() < kKeep || p.value > best.back().value) {
      best.push_back(std::move(p));
      std::sort(best.begin(), best.end(), [](const Point& a, const Point& b) { return a.value > b.value; });
      if (best.size() > kKeep) best.pop_back();
    }
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  auto perturb = [&](const std::vector<Complex>& v, double step) {
    std::vector<Complex> w = v;
    for (auto& x : w) x += step * Complex(gauss(rng), gauss(rng));
    if (detail::vec_norm(w) == 0.0) return v;
    detail::normalize(w);
    return w;
  };

  double result = 0.0;
  for (auto& p : best) {
    double step = 0.3;
    int failures = 0;
    for (int it = 0; it < 400000 && step > 1e-8; ++it) {
      Point q{0.0, perturb(p.F, step), perturb(p.G, step), perturb(p.H, step)};
      q.value = std::abs(P.value(q.F, q.G, q.H));
      if (q.value > p.value) {
        p = std::move(q);
        failures = 0;
      } else if (++failures >= 60) {
        step *= 0.5;
        failures = 0;
      }
    }
    result = std::max(result, p.value);
  }
  return result;
}

/// W(mu, nu) = (1 + |mu| + |nu|)^{-decay} restricted to |mu|_inf, |nu|_inf <= radius.
inline LatticeMatrix w_decay_matrix(double decay, int radius, int n = 1) {
  std::vector<LatticeMatrix::Entry> entries;
  const auto idx = lattice_cube(n, radius);
  for (const auto& mu : idx)
    for (const auto& nu : idx)
      entries.push_back({mu, nu, Complex(std::pow(1.0 + mu.euclidean_norm() + nu.euclidean_norm(), -decay))});
  return LatticeMatrix(n, entries);
}

/// Estimates ||W_R||_B for each truncation radius R.
inline std::vector<std::pair<int, TrilinearEstimate>> w_truncation_scan(double decay, const std::vector<int>& radii,
                                                                        int n = 1, const AscentOptions& opt = {}) {
  if (!(decay > 0.0)) throw InvalidArgument("w_truncation_scan: decay must be positive");
  for (size_t i = 1; i < radii.size(); ++i)
    if (radii[i] < radii[i - 1]) throw InvalidArgument("w_truncation_scan: radii must be ascending");
  std::vector<std::pair<int, TrilinearEstimate>> out;
  for (int R : radii) {
    if (R < 0) throw InvalidArgument("w_truncation_scan: negative radius");
    out.emplace_back(R, bnorm_ascent(w_decay_matrix(decay, R, n), opt));
  }
  return out;
}

}  // namespace lbmult
