// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion. `lbmult_acceptance 3 7` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lbmult/lbmult.hpp"

namespace {

using namespace lbmult;
using Clock = std::chrono::steady_clock;

// Thresholds.
constexpr double kExactTol = 1e-10;
constexpr double kOnesBlockTol = 1e-6;
constexpr double kCriterion1Seconds = 5.0;
constexpr std::int64_t kOracleBudget = 1000000;
constexpr double kBiorthogonalityTol = 1e-6;
constexpr double kObstructionTol = 1e-6;
constexpr int kConditionAGrid = 128;
constexpr double kCriterion2Seconds = 30.0;
constexpr int kPairingMatrices = 20;
constexpr double kPairingTol = 1e-4;
constexpr double kPairingShrink = 3.0;
constexpr double kCriterion3Seconds = 120.0;
constexpr double kCertificateSlack = 1e-3;
constexpr int kEmpiricalTrials = 100;
constexpr double kMaxSlope = 0.10;
constexpr double kFastDirectTol = 1e-8;
constexpr double kMinSpeedup = 10.0;
constexpr double kExpansionTol = 1e-6;
constexpr int kMonotoneFromShell = 4;
constexpr double kRecoveryTol = 1e-6;
constexpr int kRecoveryMatrices = 10;
constexpr int kInvariantTrials = 100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

LatticeMatrix ones_block(int k) {
  std::vector<LatticeMatrix::Entry> e;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) e.push_back({LatticeIndex{i}, LatticeIndex{j}, Complex(1.0)});
  return LatticeMatrix(1, e);
}

/// Sparse complex Gaussian matrix with indices in [-radius, radius].
LatticeMatrix random_sparse(std::mt19937_64& rng, int radius, int entries) {
  std::uniform_int_distribution<int> idx(-radius, radius);
  std::normal_distribution<double> g;
  std::map<std::pair<int, int>, Complex> e;
  while (static_cast<int>(e.size()) < entries) {
    const double re = g(rng);
    e[{idx(rng), idx(rng)}] = Complex(re, g(rng));
  }
  std::vector<LatticeMatrix::Entry> out;
  for (const auto& [k, v] : e) out.push_back({LatticeIndex{k.first}, LatticeIndex{k.second}, v});
  return LatticeMatrix(1, out);
}

LatticeSequence random_unit(std::mt19937_64& rng, int lo, int hi) {
  std::normal_distribution<double> g;
  LatticeSequence s(1);
  for (int i = lo; i <= hi; ++i) {
    const double re = g(rng);
    s.set(LatticeIndex{i}, Complex(re, g(rng)));
  }
  return s.normalized();
}

// 1: exact trilinear norms on the single entry and the 2x2 ones block.
Outcome criterion1() {
  const auto t0 = Clock::now();
  const LatticeMatrix single(1, {{LatticeIndex{0}, LatticeIndex{0}, Complex(1.0)}});
  const auto e1 = bnorm_ascent(single);
  const auto e2 = bnorm_ascent(ones_block(2));
  const double closed = std::sqrt(1.5);
  const double oracle = bnorm_oracle(ones_block(2), kOracleBudget, 1);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(e1.lower - 1.0) <= kExactTol && std::abs(e1.upper - 1.0) <= kExactTol &&
                  std::abs(e2.lower - closed) <= kOnesBlockTol && std::abs(oracle - closed) <= kOnesBlockTol &&
                  e2.lower <= e2.upper && secs < kCriterion1Seconds;
  return {ok, "single " + fmt("%.12f", e1.lower) + "/" + fmt("%.12f", e1.upper) + ", ones2 " + fmt("%.10f", e2.lower) +
                  " oracle " + fmt("%.10f", oracle) + ", " + fmt("%.2fs", secs)};
}

// 2: condition (A) verdicts for the three model bumps, in d = 1 and d = 2.
Outcome criterion2() {
  const auto t0 = Clock::now();
  const BumpSpec wide = bumps::standard(1);
  const BumpSpec narrow = bumps::standard_scaled(1, 0.0, 0.5);
  const BumpSpec pair = bumps::shift_sum(wide, {{0.0}, {1.0}}, {Complex(1.0), Complex(1.0)});
  struct Case {
    std::string name;
    BumpSpec phi;
    Box window;
    Verdict expect;
  };
  const std::vector<Case> cases{
      {"std[-1,1]", wide, Box::cube(1, -1.0, 1.0), Verdict::holds},
      {"std[-1/2,1/2]", narrow, Box::cube(1, -0.5, 0.5), Verdict::holds},
      {"phi+phi(.-1)", pair, Box::cube(1, -1.0, 2.0), Verdict::fails},
      {"std(x)std", bumps::tensor({wide, wide}), Box::cube(2, -1.0, 1.0), Verdict::holds},
      {"narrow(x)narrow", bumps::tensor({narrow, narrow}), Box::cube(2, -0.5, 0.5), Verdict::holds},
      {"pair(x)std", bumps::tensor({pair, wide}), Box({{-1.0, 2.0}, {-1.0, 1.0}}), Verdict::fails},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto r = check_condition_a(c.phi, c.window, kConditionAGrid);
    bool good = r.verdict == c.expect;
    if (c.expect == Verdict::holds) {
      good = good && r.residual <= kBiorthogonalityTol && r.residual_refined <= kBiorthogonalityTol;
    } else if (good) {
      const auto& ob = *r.obstruction;
      const auto z = ob.find(LatticeIndex::zero(c.phi.dim()));
      good = r.residual <= kObstructionTol && z != ob.end() && std::abs(z->second) > 0.0;
      // Alternating sign along the first axis.
      for (const auto& [alpha, v] : ob) {
        LatticeIndex next = alpha;
        next.coords[0] += 1;
        const auto it = ob.find(next);
        if (it != ob.end() && std::abs(v) > 1e-8 && std::abs(it->second + v) > 1e-6 * std::abs(v)) good = false;
      }
    }
    ok = ok && good;
    detail += c.name + "=" + to_string(r.verdict) + "(" + fmt("%.1e", r.residual) + "/" + fmt("%.1e", r.residual_refined) + ") ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < kCriterion2Seconds;
  return {ok, detail + fmt("%.1fs", secs)};
}

struct PairingCase {
  LatticeMatrix A{1};
  LatticeSequence F{1}, G{1}, H{1};
};

std::vector<PairingCase> pairing_cases() {
  std::vector<PairingCase> out;
  std::mt19937_64 rng(20260301);
  std::uniform_int_distribution<int> entries(1, 8);
  for (int i = 0; i < kPairingMatrices; ++i) {
    PairingCase c;
    c.A = random_sparse(rng, 4, entries(rng));
    c.F = random_unit(rng, -4, 4);
    c.G = random_unit(rng, -4, 4);
    c.H = random_unit(rng, -8, 8);
    out.push_back(std::move(c));
  }
  return out;
}

// 3: pairing identity against the exact trilinear form, and its refinement.
Outcome criterion3() {
  const auto t0 = Clock::now();
  const WitnessKit kit;
  double err64 = 0.0, err128 = 0.0, worst = 0.0;
  for (const auto& c : pairing_cases()) {
    const Complex t = trilinear_value(c.A, c.F, c.G, c.H);
    const double e64 = std::abs(pairing(c.A, kit, c.F, c.G, c.H, 64) - t);
    const double e128 = std::abs(pairing(c.A, kit, c.F, c.G, c.H, 128) - t);
    err64 += e64;
    err128 += e128;
    worst = std::max(worst, e64 / (1.0 + std::abs(t)));
  }
  const double secs = seconds_since(t0);
  const double shrink = err128 > 0.0 ? err64 / err128 : kInfinity;
  const bool ok = worst <= kPairingTol && shrink >= kPairingShrink && secs < kCriterion3Seconds;
  return {ok, "worst scaled error at m=64 " + fmt("%.2e", worst) + ", aggregate shrink 64->128 " + fmt("%.2f", shrink) + "x, " +
                  fmt("%.1fs", secs)};
}

// 4: witness certificate against kappa(kit) * bnorm_lower.
Outcome criterion4() {
  const WitnessKit kit;
  double worst = kInfinity;
  for (const auto& c : pairing_cases()) {
    const auto est = bnorm_ascent(c.A);
    const auto cert = lower_bound_certificate(c.A, kit, est, 64);
    worst = std::min(worst, cert.value / est.lower);
  }
  const bool ok = worst >= kit.kappa() - kCertificateSlack;
  return {ok, "min certificate/bnorm " + fmt("%.6f", worst) + " vs kappa " + fmt("%.6f", kit.kappa())};
}

struct FamilySpec {
  std::string family;
  std::vector<int> sizes;
  int count = 1;
};

const std::vector<FamilySpec>& families() {
  static const std::vector<FamilySpec> f{
      {"random-complex", {1, 2, 4, 8}, 2},
      {"diagonal", {1, 2, 4, 8, 16}, 1},
      {"ones-block", {1, 2, 3, 4}, 1},
      {"w-decay", {0, 1, 2, 4, 8, 16}, 1},
  };
  return f;
}

std::vector<EquivalenceReport>& family_reports() {
  static std::vector<EquivalenceReport> reports = [] {
    std::vector<EquivalenceReport> out;
    for (const auto& fs : families()) {
      ExperimentConfig cfg;
      cfg.family = fs.family;
      cfg.sizes = fs.sizes;
      cfg.count = fs.count;
      cfg.trials = kEmpiricalTrials;
      cfg.seed = 5;
      out.push_back(run_equivalence(cfg));
    }
    return out;
  }();
  return reports;
}

double normalized_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0 || my == 0.0) return 0.0;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return sxy / sxx * (*hi - *lo) / my;
}

// 5: empirical (L^2, l^1) lower bounds stay below one constant with no size trend.
Outcome criterion5() {
  bool ok = true;
  std::string detail;
  double global_max = 0.0;
  for (size_t f = 0; f < families().size(); ++f) {
    const auto& rep = family_reports()[f];
    std::vector<double> x, y;
    for (const auto& row : rep.rows) {
      x.push_back(row.size);
      y.push_back(row.ratio_empirical);
    }
    const double slope = normalized_slope(x, y);
    ok = ok && rep.upper_bounded && std::abs(slope) <= kMaxSlope;
    global_max = std::max(global_max, rep.max_ratio_empirical);
    detail += families()[f].family + " max " + fmt("%.3f", rep.max_ratio_empirical) + " slope " + fmt("%+.3f", slope) + "; ";
  }
  return {ok, detail + "constant " + fmt("%.2f", calibration::kMaxUpperRatio)};
}

// 6: q-independence of the empirical lower bounds.
Outcome criterion6() {
  bool ok = true;
  std::string detail;
  for (size_t f = 0; f < families().size(); ++f) {
    const auto& rep = family_reports()[f];
    ok = ok && rep.q_spread_bounded;
    detail += families()[f].family + " " + fmt("%.3f", rep.max_q_spread) + "; ";
  }
  return {ok, detail + "constant " + fmt("%.2f", calibration::kMaxQSpread)};
}

struct ApplyInstance {
  MultiplierField sigma;
  BandLimitedInput f, g;
  GridBox x;
};

/// k x k random block at density m: N = 8m + 1 spectral nodes per input; M = 8 x_m output nodes.
ApplyInstance apply_instance(int m, int x_m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<LatticeMatrix::Entry> e;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const double re = g(rng);
      e.push_back({LatticeIndex{i}, LatticeIndex{j}, Complex(re, g(rng))});
    }
  const WitnessKit kit;
  ApplyInstance in{assemble_sigma(LatticeMatrix(1, e), kit.Phi(), m), {}, {}, {}};
  in.f = random_band_limited_input(in.sigma, 0, rng);
  in.g = random_band_limited_input(in.sigma, 1, rng);
  in.x = GridBox(x_m, {-4 * x_m}, {4 * x_m - 1});
  return in;
}

double best_of_3(const std::function<void()>& fn) {
  double best = kInfinity;
  for (int i = 0; i < 3; ++i) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

// 7: FFT path against direct quadrature, and its speed.
Outcome criterion7() {
  double worst = 0.0;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const auto in = apply_instance(16, 32, s);
    const auto fast = apply_T(in.sigma, in.f, in.g, in.x);
    const auto direct = apply_T(in.sigma, in.f, in.g, in.x, {true, 1});
    double diff = 0.0, scale = 0.0;
    for (size_t i = 0; i < fast.values.size(); ++i) {
      diff = std::max(diff, std::abs(fast.values[i] - direct.values[i]));
      scale = std::max(scale, std::abs(direct.values[i]));
    }
    worst = std::max(worst, diff / scale);
  }
  const auto big = apply_instance(32, 64, 9);
  const double t_fast = best_of_3([&] { (void)apply_T(big.sigma, big.f, big.g, big.x); });
  const double t_direct = best_of_3([&] { (void)apply_T(big.sigma, big.f, big.g, big.x, {true, 1}); });
  const double speedup = t_direct / t_fast;
  const bool ok = worst <= kFastDirectTol && speedup >= kMinSpeedup;
  return {ok, "N=" + std::to_string(spectral_grid(big.sigma, 0).count(0) - 1) + "/" + std::to_string(big.x.count(0)) +
                  " sup rel diff (N=128) " + fmt("%.2e", worst) + ", speedup " + fmt("%.1fx", speedup) + " (" +
                  fmt("%.4fs", t_fast) + " vs " + fmt("%.4fs", t_direct) + ")"};
}

// 8: separable expansion of the tensor standard bump.
Outcome criterion8() {
  const auto ex = separable_expansion(bumps::standard(2), kExpansionTol);
  const auto shells = shell_maxima(ex);
  int first_bad = -1;
  for (size_t s = static_cast<size_t>(kMonotoneFromShell) + 1; s < shells.size(); ++s)
    if (shells[s] > shells[s - 1]) {
      first_bad = static_cast<int>(s);
      break;
    }
  const bool ok = ex.error <= kExpansionTol && !ex.terms.empty() && first_bad < 0;
  std::string detail = "error " + fmt("%.2e", ex.error) + " with " + std::to_string(ex.terms.size()) + " terms (cap " +
                       std::to_string(ex.cap) + ")";
  if (first_bad >= 0)
    detail += "; shell maxima increase at shell " + std::to_string(first_bad) + ": " + fmt("%.3e", shells[first_bad - 1]) +
              " -> " + fmt("%.3e", shells[first_bad]);
  else
    detail += "; shell maxima nonincreasing beyond shell " + std::to_string(kMonotoneFromShell);
  return {ok, detail};
}

// 9: matrix recovery by averaging Theta * sigma_{A,Phi}.
Outcome criterion9() {
  const int m = 64;
  const BumpSpec Phi = bumps::standard(2);
  const auto ca = check_condition_a(Phi, Box::cube(2, -1.0, 1.0), m);
  if (ca.verdict != Verdict::holds) return {false, std::string("condition (A) verdict ") + to_string(ca.verdict)};
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> entries(1, 10);
  double worst = 0.0;
  for (int i = 0; i < kRecoveryMatrices; ++i) {
    const LatticeMatrix A = random_sparse(rng, 3, entries(rng));
    const auto sigma = assemble_sigma(A, Phi, m);
    const LatticeMatrix B = average_matrix(recovery_family(sigma, *ca.theta_bump), m, 2.0);
    for (const auto& [key, a] : A.entries()) {
      const auto it = B.entries().find(key);
      worst = std::max(worst, std::abs((it == B.entries().end() ? Complex{} : it->second) - a));
    }
  }
  return {worst <= kRecoveryTol, "max entry error " + fmt("%.2e", worst) + " over " + std::to_string(kRecoveryMatrices) + " matrices"};
}

// 10: invariant suites.
Outcome criterion10() {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int> entries(1, 6);
  std::uniform_int_distribution<int> shift(-5, 5);
  std::bernoulli_distribution coin(0.6);
  std::map<std::string, int> violations;
  const std::vector<std::string> suites{"translation", "mask", "scaling", "amalgam-q", "modulation", "ascent"};
  for (const auto& s : suites) violations[s] = 0;
  const WitnessKit kit;

  for (int t = 0; t < kInvariantTrials; ++t) {
    const LatticeMatrix A = random_sparse(rng, 2, entries(rng));
    AscentOptions opt;
    opt.seed = static_cast<std::uint64_t>(t);

    // Translation.
    const LatticeIndex s0{shift(rng)}, s1{shift(rng)};
    const double base = bnorm_ascent(A, opt).lower;
    const double moved = bnorm_ascent(A.translated(s0, s1), opt).lower;
    if (std::abs(base - moved) > 1e-9 * std::max(1.0, base)) ++violations["translation"];

    // Product masks.
    LatticeSequence alpha(1), alpha_p(1);
    for (int i = -2; i <= 2; ++i) {
      alpha.set(LatticeIndex{i}, coin(rng) ? 1.0 : 0.0);
      alpha_p.set(LatticeIndex{i}, coin(rng) ? 1.0 : 0.0);
    }
    const double masked = bnorm_ascent(mask_matrix(A, alpha, alpha_p), opt).lower;
    if (masked > base + 1e-8) ++violations["mask"];

    // Scaling, for all three estimators.
    const Complex c = std::polar(0.25 + 3.0 * std::generate_canonical<double, 53>(rng), 6.283 * std::generate_canonical<double, 53>(rng));
    const LatticeMatrix cA = A.scaled(c);
    const double ac = std::abs(c);
    const double rel = 1e-12;
    if (std::abs(bnorm_ascent(cA, opt).lower - ac * base) > rel * ac * base) ++violations["scaling"];
    if (std::abs(bnorm_upper(cA) - ac * bnorm_upper(A)) > rel * ac * bnorm_upper(A)) ++violations["scaling"];
    const LatticeMatrix small = random_sparse(rng, 1, 3);
    const double o = bnorm_oracle(small, 2000, opt.seed);
    if (std::abs(bnorm_oracle(small.scaled(c), 2000, opt.seed) - ac * o) > rel * ac * o) ++violations["scaling"];

    // Monotone ascent.
    AscentOptions watch = opt;
    watch.restarts = 4;
    std::map<int, double> last;
    bool mono = true;
    watch.observer = [&](int restart, int, double v) {
      auto it = last.find(restart);
      if (it != last.end() && v < it->second - 1e-12 * std::max(1.0, it->second)) mono = false;
      last[restart] = v;
    };
    (void)bnorm_ascent(A, watch);
    if (!mono) ++violations["ascent"];

    // Amalgam q-ordering on a random sampled field.
    {
      std::normal_distribution<double> g;
      const int lo = -3 * 8 - 4, hi = 2 * 8 + 3;
      SampledField f(GridBox(8, {lo}, {hi}));
      for (auto& v : f.values) {
        const double re = g(rng);
        v = Complex(re, g(rng)) * (coin(rng) ? 1.0 : 0.05);
      }
      double prev = kInfinity;
      for (double q : {1.0, 1.5, 2.0, 4.0, kInfinity}) {
        const double v = amalgam_norm(f, q).value;
        if (v > prev * (1.0 + 1e-12)) ++violations["amalgam-q"];
        prev = v;
      }
    }

    // Modulation: shift sigma and the spectra by whole grid steps.
    {
      const int m = 8;
      const MultiplierField sigma = assemble_sigma(random_sparse(rng, 1, entries(rng)), kit.Phi(), m);
      std::mt19937_64 local(static_cast<std::uint64_t>(t) + 77);
      const BandLimitedInput f = random_band_limited_input(sigma, 0, local);
      const BandLimitedInput g = random_band_limited_input(sigma, 1, local);
      std::uniform_int_distribution<int> step(-2 * m, 2 * m);
      const std::int64_t a = step(rng), b = step(rng);
      auto moved_grid = [](const GridBox& gb, std::vector<std::int64_t> d) {
        std::vector<std::int64_t> lo = gb.lo_indices(), hi = gb.hi_indices();
        for (size_t i = 0; i < lo.size(); ++i) {
          lo[i] += d[i];
          hi[i] += d[i];
        }
        return GridBox(gb.m(), lo, hi);
      };
      MultiplierField s2 = sigma;
      s2.grid = moved_grid(sigma.grid, {a, b});
      const BandLimitedInput f2(SampledField(moved_grid(f.spectrum.grid, {a}), f.spectrum.values));
      const BandLimitedInput g2(SampledField(moved_grid(g.spectrum.grid, {b}), g.spectrum.values));
      const GridBox xg = default_output_grid(sigma);
      const auto T1 = apply_T(sigma, f, g, xg);
      const auto T2 = apply_T(s2, f2, g2, xg);
      for (double q : {1.0, 2.0, kInfinity}) {
        const double n1 = amalgam_norm(T1, q).value, n2 = amalgam_norm(T2, q).value;
        if (std::abs(n1 - n2) > 1e-8 * std::max(1.0, n1)) ++violations["modulation"];
      }
    }
  }
  bool ok = true;
  std::string detail;
  for (const auto& s : suites) {
    ok = ok && violations[s] == 0;
    detail += s + " " + std::to_string(violations[s]) + " ";
  }
  return {ok, detail + "violations over " + std::to_string(kInvariantTrials) + " trials"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
