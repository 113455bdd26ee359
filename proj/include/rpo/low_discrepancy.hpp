// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "rpo/random.hpp"
#include "rpo/types.hpp"

namespace rpo {

/// Plain Halton points with indices first, first+1, ..., first+n-1 (rows)
/// in dimensions using the first `dim` primes. dim <= 32.
Mat halton(Eigen::Index n, Eigen::Index dim, Eigen::Index first = 1);

/// Halton points with random digit scrambling: every (dimension, digit
/// position) pair gets its own permutation of {0..p-1} drawn from `stream`,
/// applied to all digits down to double resolution. Rows lie in [0, 1).
Mat scrambled_halton(Eigen::Index n, Eigen::Index dim, RandomStream& stream);

}  // namespace rpo
