// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/low_discrepancy.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "rpo/errors.hpp"

namespace rpo {

namespace {

constexpr std::array<int, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23,  29,  31,
                                         37, 41, 43, 47, 53, 59, 61, 67, 71,  73,  79,
                                         83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

void check_dim(Eigen::Index dim) {
  if (dim < 1 || dim > static_cast<Eigen::Index>(kPrimes.size()))
    throw DomainError("Halton dimension must be in [1, 32]");
}

// Number of base-p digits needed to reach double resolution.
int digits_for(int p) {
  return static_cast<int>(std::ceil(53.0 * std::log(2.0) / std::log(static_cast<double>(p))));
}

}  // namespace

Mat halton(Eigen::Index n, Eigen::Index dim, Eigen::Index first) {
  check_dim(dim);
  Mat out(n, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const int p = kPrimes[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      auto k = static_cast<unsigned long long>(first + i);
      double f = 1.0, r = 0.0;
      while (k > 0) {
        f /= p;
        r += f * static_cast<double>(k % static_cast<unsigned>(p));
        k /= static_cast<unsigned>(p);
      }
      out(i, j) = r;
    }
  }
  return out;
}

Mat scrambled_halton(Eigen::Index n, Eigen::Index dim, RandomStream& stream) {
  check_dim(dim);
  Mat out(n, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const int p = kPrimes[static_cast<std::size_t>(j)];
    const int ndig = digits_for(p);
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(ndig));
    for (auto& perm : perms) {
      perm.resize(static_cast<std::size_t>(p));
      std::iota(perm.begin(), perm.end(), 0);
      for (int a = p - 1; a > 0; --a) {
        const auto b = static_cast<int>(stream.below(static_cast<std::uint64_t>(a) + 1));
        std::swap(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      auto k = static_cast<unsigned long long>(i);
      double f = 1.0, r = 0.0;
      for (int d = 0; d < ndig; ++d) {
        f /= p;
        const int digit = static_cast<int>(k % static_cast<unsigned>(p));
        k /= static_cast<unsigned>(p);
        r += f * perms[static_cast<std::size_t>(d)][static_cast<std::size_t>(digit)];
      }
      out(i, j) = r < 1.0 ? r : std::nextafter(1.0, 0.0);
    }
  }
  return out;
}

}  // namespace rpo
