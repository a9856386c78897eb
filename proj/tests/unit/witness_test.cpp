// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lbmult/lbmult.hpp"
#include "test_util.hpp"

namespace lbmult {
namespace {

using testing::kit;
using testing::random_sparse;
using testing::random_unit;
using testing::single_entry;

const LatticeSequence e0 = LatticeSequence::delta(LatticeIndex{0});

TEST(WitnessKit, SupportsAndPlateau) {
  EXPECT_EQ(kit().theta().support(), Box::cube(1, -0.25, 0.25));
  EXPECT_EQ(kit().phi().support(), Box::cube(1, -0.5, 0.5));
  const auto p = sample(kit().phi(), GridBox::exact(Box::cube(1, -1.0, 1.0), 64));
  for (std::int64_t k = 0; k < p.grid.size(); ++k) {
    const double x = p.grid.node(0, k);
    if (std::abs(x) <= 0.25) { EXPECT_EQ(p.values[static_cast<size_t>(k)], Complex(1.0)); }
    if (std::abs(x) >= 0.5) { EXPECT_EQ(p.values[static_cast<size_t>(k)], Complex{}); }
  }
  EXPECT_GT(kit().c0(), kMinC0);
  EXPECT_NEAR(kit().kappa(), kit().c0() * kit().c0() / (kit().theta_l2() * kit().theta_l2()), 1e-15);
}

TEST(WitnessInputs, SingleTranslateIsTheta) {
  const int m = 64;
  const auto [f, g] = build_witness_inputs(kit(), e0, e0, m);
  const auto direct = sample(kit().theta(), f.spectrum.grid);
  EXPECT_EQ(f.spectrum.values, direct.values);
  EXPECT_NEAR(f.declared_norm, l2_norm(sample(kit().theta(), GridBox::exact(Box::cube(1, -0.5, 0.5), m))), 1e-15);
}

TEST(WitnessInputs, DisjointTranslatesPreserveNorm) {
  LatticeSequence F(1);
  F.set(LatticeIndex{0}, 0.6);
  F.set(LatticeIndex{5}, 0.8);
  const auto [f, g] = build_witness_inputs(kit(), F, e0, 64);
  const double t = l2_norm(sample(kit().theta(), GridBox::exact(Box::cube(1, -0.5, 0.5), 64)));
  EXPECT_NEAR(f.declared_norm * f.declared_norm, t * t, 1e-10);
  // Distinct translates never share a nonzero node.
  const auto& s = f.spectrum;
  for (std::int64_t k = 0; k < s.grid.size(); ++k) {
    const double x = s.grid.node(0, k);
    const double y0 = x, y5 = x - 5.0;
    const Complex a = kit().theta()({y0}), b = kit().theta()({y5});
    EXPECT_EQ(a * b, Complex{});
  }
}

TEST(WitnessInputs, RejectNonUnit) {
  EXPECT_THROW(build_witness_inputs(kit(), e0.scaled(2.0), e0, 64), InvalidArgument);
  EXPECT_THROW(build_h(kit(), e0.scaled(0.5), 64), InvalidArgument);
}

TEST(BuildH, DeltaGivesReciprocalSquare) {
  const auto h = build_h(kit(), e0, 32);
  const auto& ft = kit().inverse_theta(32);
  for (size_t i = 0; i < h.h.values.size(); ++i) {
    EXPECT_NEAR(std::abs(h.h.values[i] - 1.0 / (ft.values[i] * ft.values[i])), 0.0, 1e-12 * std::abs(h.h.values[i]));
    EXPECT_GT(h.h.values[i].real(), 0.0);
  }
}

TEST(BuildH, NormBounds) {
  std::mt19937_64 rng(40);
  const auto& ft = kit().inverse_theta(64);
  double sup = 0.0;
  for (const auto& v : ft.values) sup = std::max(sup, std::abs(v));
  for (int t = 0; t < 20; ++t) {
    const auto H = random_unit(rng, -6, 6);
    const double l2 = build_h(kit(), H, 64).l2;
    EXPECT_GE(l2, 1.0 / (sup * sup) - 1e-12);
    EXPECT_LE(l2, 1.0 / (kit().c0() * kit().c0()) + 1e-12);
  }
}

TEST(BuildH, LinearInH) {
  LatticeSequence H1 = LatticeSequence::delta(LatticeIndex{1}), H2 = LatticeSequence::delta(LatticeIndex{-3});
  const auto sum = (H1.scaled(0.6) + H2.scaled(Complex(0.0, 0.8)));
  const auto h = build_h(kit(), sum, 32).h, a = build_h(kit(), H1, 32).h, b = build_h(kit(), H2, 32).h;
  for (size_t i = 0; i < h.values.size(); ++i)
    EXPECT_LT(std::abs(h.values[i] - 0.6 * a.values[i] - Complex(0.0, 0.8) * b.values[i]), 1e-12 * std::abs(h.values[i]) + 1e-14);
}

TEST(Pairing, SingleEntryIsOne) {
  EXPECT_NEAR(std::abs(pairing(single_entry(), kit(), e0, e0, e0, 128) - 1.0), 0.0, 1e-6);
  EXPECT_EQ(pairing(LatticeMatrix(1), kit(), e0, e0, e0, 64), Complex{});
}

TEST(Pairing, RandomMatricesAndRefinement) {
  std::mt19937_64 rng(41);
  double e32 = 0.0, e64 = 0.0, e128 = 0.0;
  for (int t = 0; t < 6; ++t) {
    const LatticeMatrix A = random_sparse(rng, 3, 1 + t);
    const auto F = random_unit(rng, -3, 3), G = random_unit(rng, -3, 3), H = random_unit(rng, -6, 6);
    const Complex exact = trilinear_value(A, F, G, H);
    const double a = std::abs(pairing(A, kit(), F, G, H, 32) - exact);
    const double b = std::abs(pairing(A, kit(), F, G, H, 64) - exact);
    const double c = std::abs(pairing(A, kit(), F, G, H, 128) - exact);
    EXPECT_LE(b, 1e-4 * (1.0 + std::abs(exact)));
    e32 += a, e64 += b, e128 += c;
  }
  EXPECT_GE(e32 / e64, 3.0);
  EXPECT_GE(e64 / e128, 3.0);
}

TEST(Pairing, IndexTranslationEquivariance) {
  std::mt19937_64 rng(42);
  const LatticeMatrix A = random_sparse(rng, 2, 4);
  const auto F = random_unit(rng, -2, 2), G = random_unit(rng, -2, 2), H = random_unit(rng, -4, 4);
  const LatticeIndex m0{2}, n0{-1};
  const Complex p = pairing(A, kit(), F, G, H, 64);
  const Complex q = pairing(A.translated(m0, n0), kit(), F.translated(m0), G.translated(n0), H.translated(m0 + n0), 64);
  EXPECT_LT(std::abs(p - q), 1e-10);
}

TEST(Pairing, MaskedMatrixMatchesMaskedSequences) {
  std::mt19937_64 rng(43);
  const LatticeMatrix A = random_sparse(rng, 2, 6);
  const auto F = random_unit(rng, -2, 2), G = random_unit(rng, -2, 2), H = random_unit(rng, -4, 4);
  LatticeSequence alpha(1), beta(1);
  for (int i = -2; i <= 2; ++i) {
    alpha.set(LatticeIndex{i}, i % 2 == 0 ? 1.0 : 0.0);
    beta.set(LatticeIndex{i}, i >= 0 ? 1.0 : 0.0);
  }
  LatticeSequence Fa(1), Gb(1);
  for (const auto& [k, v] : F.values()) Fa.set(k, v * alpha(k));
  for (const auto& [k, v] : G.values()) Gb.set(k, v * beta(k));
  const double fn = Fa.norm(), gn = Gb.norm();
  const Complex lhs = pairing(mask_matrix(A, alpha, beta), kit(), F, G, H, 64);
  const Complex rhs = pairing(A, kit(), Fa.normalized(), Gb.normalized(), H, 64) * fn * gn;
  EXPECT_LT(std::abs(lhs - rhs), 1e-10);
}

TEST(Certificate, SingleEntryAndChain) {
  const auto est = bnorm_ascent(single_entry());
  const auto c = lower_bound_certificate(single_entry(), kit(), est, 128);
  EXPECT_GE(c.value, c.cs_floor);
  EXPECT_NEAR(std::abs(c.pairing), 1.0, 1e-6);
  const double t2 = kit().theta_l2() * kit().theta_l2();
  EXPECT_GE(c.value, std::abs(c.pairing) / (t2 * c.h_l2) - 1e-10);
  std::mt19937_64 rng(44);
  for (int t = 0; t < 10; ++t) {
    const LatticeMatrix A = random_sparse(rng, 3, 1 + t % 6);
    const auto e = bnorm_ascent(A);
    EXPECT_GE(lower_bound_certificate(A, kit(), e, 64).value, e.lower * kit().kappa() - 1e-6);
  }
}

TEST(Certificate, ScalesWithMatrix) {
  std::mt19937_64 rng(45);
  const LatticeMatrix A = random_sparse(rng, 2, 4);
  const auto e = bnorm_ascent(A);
  const Complex c(1.5, -2.0);
  const auto ec = bnorm_ascent(A.scaled(c));
  const double base = lower_bound_certificate(A, kit(), e, 32).value;
  EXPECT_NEAR(lower_bound_certificate(A.scaled(c), kit(), ec, 32).value, std::abs(c) * base, 1e-10 * std::abs(c) * base);
}

TEST(Certificate, BelowEmpiricalWithWitnessTrial) {
  std::mt19937_64 rng(46);
  const int m = 16;
  for (int t = 0; t < 4; ++t) {
    const LatticeMatrix A = random_sparse(rng, 2, 1 + t);
    const auto e = bnorm_ascent(A);
    const auto sigma = assemble_sigma(A, kit().Phi(), m);
    const GridBox xg = default_output_grid(sigma);
    EmpiricalOptions o;
    o.x_grid = xg;
    o.extra_pairs.push_back(witness_pair(kit(), e, m));
    const double emp = empirical_operator_lower(sigma, kInfinity, 2, 5, o).value;
    EXPECT_LE(lower_bound_certificate(A, kit(), e, m, xg.m()).value, emp + 1e-10);
  }
}

TEST(Mask, Basics) {
  std::mt19937_64 rng(47);
  const LatticeMatrix A = random_sparse(rng, 2, 8);
  LatticeSequence ones(1), row0(1);
  for (int i = -2; i <= 2; ++i) ones.set(LatticeIndex{i}, 1.0);
  row0.set(LatticeIndex{0}, 1.0);
  EXPECT_EQ(mask_matrix(A, ones, ones).entries(), A.entries());
  const LatticeMatrix masked = mask_matrix(A, row0, ones);
  for (const auto& [key, v] : masked.entries()) EXPECT_EQ(key.first, LatticeIndex{0});
  LatticeSequence bad(1);
  bad.set(LatticeIndex{0}, 0.5);
  EXPECT_THROW(mask_matrix(A, bad, ones), InvalidArgument);
}

TEST(Mask, NormMonotone) {
  std::mt19937_64 rng(48);
  std::bernoulli_distribution coin(0.5);
  const LatticeMatrix A = random_sparse(rng, 2, 8);
  const double base = bnorm_ascent(A).lower;
  for (int t = 0; t < 50; ++t) {
    LatticeSequence a(1), b(1);
    for (int i = -2; i <= 2; ++i) {
      a.set(LatticeIndex{i}, coin(rng) ? 1.0 : 0.0);
      b.set(LatticeIndex{i}, coin(rng) ? 1.0 : 0.0);
    }
    EXPECT_LE(bnorm_ascent(mask_matrix(A, a, b)).lower, base + 1e-8);
  }
}

SampledField profile_at(const LatticeIndex& mu, const LatticeIndex& nu, Complex c, int m) {
  const BumpSpec p = bumps::standard_scaled({0.0, 0.0}, {0.5, 0.5});
  const GridBox g = GridBox::exact(Box::cube(2, -0.5, 0.5).translated(std::vector<double>{double(mu[0]), double(nu[0])}), m);
  SampledField f(g);
  std::vector<double> x;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    f.values[static_cast<size_t>(i)] = c * p({x[0] - mu[0], x[1] - nu[0]});
  }
  return f;
}

TEST(AverageMatrix, TranslatedProfileAndZero) {
  const int m = 32;
  SigmaFamily fam, zero;
  const Complex c(2.0, -1.0);
  for (int i = -1; i <= 1; ++i)
    for (int j = 0; j <= 2; ++j) {
      fam[{LatticeIndex{i}, LatticeIndex{j}}] = profile_at(LatticeIndex{i}, LatticeIndex{j}, c, m);
      zero[{LatticeIndex{i}, LatticeIndex{j}}] = profile_at(LatticeIndex{i}, LatticeIndex{j}, 0.0, m);
    }
  const Complex integral = c * quad(profile_at(LatticeIndex{0}, LatticeIndex{0}, 1.0, m));
  const LatticeMatrix B = average_matrix(fam, m, 1.0), Z = average_matrix(zero, m, 1.0);
  EXPECT_EQ(B.entries().size(), 9u);
  for (const auto& [key, v] : B.entries()) EXPECT_LT(std::abs(v - integral), 1e-14);
  for (const auto& [key, v] : Z.entries()) EXPECT_EQ(v, Complex{});
  SigmaFamily off;
  off[{LatticeIndex{0}, LatticeIndex{0}}] = profile_at(LatticeIndex{0}, LatticeIndex{3}, c, m);
  EXPECT_THROW(average_matrix(off, m, 1.0), InvalidArgument);
}

TEST(AverageMatrix, RecoversAFromDualWindow) {
  const int m = 64;
  const BumpSpec Phi = bumps::standard(2);
  const auto ca = check_condition_a(Phi, Box::cube(2, -1.0, 1.0), m);
  ASSERT_EQ(ca.verdict, Verdict::holds);
  std::mt19937_64 rng(49);
  for (int t = 0; t < 3; ++t) {
    const LatticeMatrix A = random_sparse(rng, 2, 3 + t);
    const LatticeMatrix B = average_matrix(recovery_family(assemble_sigma(A, Phi, m), *ca.theta_bump), m, 2.0);
    for (const auto& [key, a] : A.entries()) EXPECT_LT(std::abs(B(key.first, key.second) - a), 1e-6);
  }
}

}  // namespace
}  // namespace lbmult
