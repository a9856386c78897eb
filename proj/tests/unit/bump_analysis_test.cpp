// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lbmult/lbmult.hpp"

namespace lbmult {
namespace {

const BumpSpec& wide() {
  static const BumpSpec b = bumps::standard(1);
  return b;
}

BumpSpec pair_bump() { return bumps::shift_sum(wide(), {{0.0}, {1.0}}, {Complex(1.0), Complex(1.0)}); }

TEST(ConditionA, StandardBumpHolds) {
  const auto r = check_condition_a(wide(), Box::cube(1, -1.0, 1.0), 64);
  ASSERT_EQ(r.verdict, Verdict::holds);
  ASSERT_EQ(r.translates.size(), 3u);
  EXPECT_EQ(r.translates.front(), LatticeIndex{-1});
  EXPECT_EQ(r.translates.back(), LatticeIndex{1});
  EXPECT_EQ(r.rank, 3);
  EXPECT_LE(r.residual, 1e-8);
  EXPECT_LE(r.residual_refined, 2.0 * r.residual + 1e-8);
  ASSERT_TRUE(r.theta.has_value());
  ASSERT_TRUE(r.theta_bump.has_value());
}

TEST(ConditionA, NarrowSupportHoldsWithSingleTranslate) {
  const auto r = check_condition_a(bumps::standard_scaled(1, 0.0, 0.5), Box::cube(1, -0.5, 0.5), 64);
  ASSERT_EQ(r.verdict, Verdict::holds);
  EXPECT_EQ(r.translates.size(), 1u);
  // One translate: Theta is a normalized multiple of the cutoff-weighted phi, so R(0) = 1.
  const auto R = lattice_cross_correlation(*r.theta_bump, bumps::standard_scaled(1, 0.0, 0.5), 2, 256);
  EXPECT_NEAR(std::abs(R.at(LatticeIndex{0}) - 1.0), 0.0, 1e-6);
}

TEST(ConditionA, ShiftSumFailsWithAlternatingObstruction) {
  const BumpSpec p = pair_bump();
  const Box window = Box::cube(1, -1.0, 2.0);
  const auto r = check_condition_a(p, window, 64);
  ASSERT_EQ(r.verdict, Verdict::fails);
  const auto& c = *r.obstruction;
  const Complex c0 = c.at(LatticeIndex{0});
  EXPECT_GT(std::abs(c0), 1e-8);
  for (const auto& [alpha, v] : c) {
    const Complex expect = (alpha[0] % 2 == 0 ? 1.0 : -1.0) * c0;
    EXPECT_LT(std::abs(v - expect), 1e-8) << alpha.to_string();
  }
  // Independent check of the relation on a fine grid over the window.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(window[0].lo, window[0].hi);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng);
    Complex s{};
    for (const auto& [alpha, v] : c) {
      const double y = x - alpha[0];
      s += v * p(std::span<const double>(&y, 1));
    }
    EXPECT_LT(std::abs(s), 1e-8);
  }
}

TEST(ConditionA, InputErrors) {
  EXPECT_THROW(check_condition_a(wide(), Box::cube(1, -1.0, 1.0), 16), InvalidArgument);
  EXPECT_THROW(check_condition_a(wide(), Box::cube(1, -0.3, 1.0), 64), InvalidArgument);
  EXPECT_THROW(check_condition_a(wide(), Box::cube(2, -1.0, 1.0), 64), DimensionMismatch);
  EXPECT_THROW(check_condition_a(bumps::standard_scaled(1, 0.25, 0.2), Box::cube(1, 0.5, 1.0), 64), InvalidArgument);
}

TEST(CrossCorrelation, SelfCorrelationAtZeroIsL2Squared) {
  const auto R = lattice_cross_correlation(wide(), wide(), 2, 256);
  const double l2 = l2_norm(sample(wide(), GridBox::exact(Box::cube(1, -1.0, 1.0), 256)));
  EXPECT_NEAR(R.at(LatticeIndex{0}).real(), l2 * l2, 1e-14);
  EXPECT_EQ(R.at(LatticeIndex{2}), Complex{});
  EXPECT_EQ(R.at(LatticeIndex{-2}), Complex{});
  EXPECT_THROW(lattice_cross_correlation(wide(), wide(), 0, 64), InvalidArgument);
}

TEST(CrossCorrelation, DualWindowIsBiorthogonalAtTwoResolutions) {
  const auto r = check_condition_a(wide(), Box::cube(1, -1.0, 1.0), 64);
  for (int m : {64, 128}) {
    const auto R = lattice_cross_correlation(*r.theta_bump, wide(), 3, m);
    for (const auto& [alpha, v] : R) EXPECT_LT(std::abs(v - (alpha == LatticeIndex{0} ? 1.0 : 0.0)), 1e-6) << m << alpha.to_string();
  }
}

TEST(CrossCorrelation, SampledAndClosedFormThetaAgree) {
  const auto r = check_condition_a(wide(), Box::cube(1, -1.0, 1.0), 64);
  const auto a = lattice_cross_correlation(*r.theta, wide(), 3);
  const auto b = lattice_cross_correlation(*r.theta_bump, wide(), 3, 64);
  for (const auto& [alpha, v] : a) EXPECT_LT(std::abs(v - b.at(alpha)), 1e-12);
}

/// (1/N) sum_j u(xi_j) e^{-2 pi i k xi_j / T}, xi_j = -T/2 + j T / N.
Complex fourier_coefficient_1d(const BumpSpec& u, int T, int N, int k) {
  Complex s{};
  for (int j = 0; j < N; ++j) {
    const double xi = -0.5 * T + static_cast<double>(j) * T / N;
    s += u(std::span<const double>(&xi, 1)) * std::polar(1.0, -2.0 * std::numbers::pi * k * xi / T);
  }
  return s / static_cast<double>(N);
}

TEST(Expansion, SeparableBumpHasProductCoefficients) {
  const BumpSpec u = wide();
  const BumpSpec v = bumps::standard_scaled(1, 0.2, 0.6);
  const auto ex = separable_expansion(bumps::tensor({u, v}), 1e-6);
  EXPECT_EQ(ex.T, 4);
  for (const auto& [kl, b] : ex.box_coefficients) {
    if (kl.first.sup_norm() > 6 || kl.second.sup_norm() > 6) continue;
    const Complex expect = fourier_coefficient_1d(u, ex.T, ex.N, kl.first[0]) * fourier_coefficient_1d(v, ex.T, ex.N, kl.second[0]);
    EXPECT_LT(std::abs(b - expect), 1e-10);
  }
}

TEST(Expansion, ReconstructsOnTheSampleGrid) {
  const BumpSpec Phi = bumps::standard(2);
  const auto ex = separable_expansion(Phi, 1e-6);
  EXPECT_LE(ex.error, 1e-6);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> node(-ex.N / 2, ex.N / 2 - 1);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x{static_cast<double>(node(rng)) * ex.T / ex.N, static_cast<double>(node(rng)) * ex.T / ex.N};
    EXPECT_LT(std::abs(evaluate(ex, x) - Phi(x)), 1e-6);
  }
}

TEST(Expansion, ErrorDecreasesWithCap) {
  const auto prof = expansion_error_profile(bumps::standard(2), {2, 4, 8, 16, 32, 64});
  for (size_t i = 1; i < prof.size(); ++i) EXPECT_LE(prof[i], prof[i - 1]);
}

TEST(Expansion, ZeroBumpHasNoTerms) {
  const BumpSpec zero(Box::cube(2, -0.5, 0.5), [](std::span<const double>) { return Complex{}; }, true, "zero");
  const auto ex = separable_expansion(zero, 1e-6);
  EXPECT_TRUE(ex.terms.empty());
  EXPECT_EQ(ex.error, 0.0);
}

TEST(Expansion, InputErrors) {
  EXPECT_THROW(separable_expansion(wide(), 1e-6), InvalidArgument);
  EXPECT_THROW(separable_expansion(bumps::standard(2), 0.0), InvalidArgument);
}

}  // namespace
}  // namespace lbmult
