// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lbmult/amalgam.hpp"
#include "lbmult/bump.hpp"
#include "lbmult/calibration.hpp"
#include "lbmult/condition_a.hpp"
#include "lbmult/error.hpp"
#include "lbmult/expansion.hpp"
#include "lbmult/experiment.hpp"
#include "lbmult/fft.hpp"
#include "lbmult/fourier.hpp"
#include "lbmult/grid.hpp"
#include "lbmult/io.hpp"
#include "lbmult/lattice.hpp"
#include "lbmult/multiplier.hpp"
#include "lbmult/parallel.hpp"
#include "lbmult/trilinear.hpp"
#include "lbmult/witness.hpp"
