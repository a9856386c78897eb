// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Bounded-ratio thresholds for run_equivalence. These are properties of this
// implementation (grid m = 16, 100 trials, seed 5, the default witness kit), measured
// once on the acceptance families and rounded up; they are not constants from the theory.
// Measured maxima: upper ratio 1.104 (random-complex), q-spread 3.175 (w-decay radius 8).

namespace lbmult::calibration {

/// Upper bound for empirical (L^2, l^1) lower bound / bnorm_lower.
inline constexpr double kMaxUpperRatio = 1.5;

/// Upper bound for max_q / min_q of the empirical lower bounds over q in {1, 2, inf}.
inline constexpr double kMaxQSpread = 4.0;

}  // namespace lbmult::calibration
