// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

// Walks through the library on the 2x2 ones block: ||A||_B, sigma_{A,Phi}, the
// witness certificate and empirical amalgam lower bounds.

#include <cstdio>

#include "lbmult/lbmult.hpp"

int main() {
  using namespace lbmult;
  const LatticeMatrix A(1, {{LatticeIndex{0}, LatticeIndex{0}, 1.0},
                            {LatticeIndex{0}, LatticeIndex{1}, 1.0},
                            {LatticeIndex{1}, LatticeIndex{0}, 1.0},
                            {LatticeIndex{1}, LatticeIndex{1}, 1.0}});
  const TrilinearEstimate est = bnorm_ascent(A);
  std::printf("||A||_B in [%.12f, %.12f]\n", est.lower, est.upper);

  const WitnessKit kit;
  std::printf("kit: theta_l2 = %.6g  c0 = %.6g  kappa = %.6g\n", kit.theta_l2(), kit.c0(), kit.kappa());

  const int m = 16;
  const MultiplierField sigma = assemble_sigma(A, kit.Phi(), m);
  const GridBox xg = default_output_grid(sigma);
  const Certificate cert = lower_bound_certificate(A, kit, est, m, xg.m());
  std::printf("witness certificate %.6g  (ratio to ||A||_B: %.4f)\n", cert.value, cert.value / est.lower);

  EmpiricalOptions opt;
  opt.x_grid = xg;
  opt.extra_pairs.push_back(witness_pair(kit, est, m));
  for (const auto& r : empirical_operator_lower(sigma, {1.0, 2.0, kInfinity}, 50, 7, opt))
    std::printf("q = %-4s empirical lower %.6g  (best trial %d)\n", io::q_label(r.q).c_str(), r.value, r.best_trial);
  return 0;
}
