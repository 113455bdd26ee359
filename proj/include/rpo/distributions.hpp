// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rpo/parameter_space.hpp"
#include "rpo/random.hpp"
#include "rpo/types.hpp"

namespace rpo {

/// Standard normal density.
double normal_pdf(double z);
/// Standard normal CDF, via std::erfc (accurate in both tails).
double normal_cdf(double z);
/// Upper tail 1 - normal_cdf(z) without cancellation.
double normal_sf(double z);
/// Inverse of normal_cdf for p in (0, 1); Wichura's AS241 (PPND16),
/// relative accuracy about 1e-16. Returns +-inf at 0 and 1.
double normal_quantile(double p);

enum class DistributionKind { normal, lognormal };

std::string_view to_string(DistributionKind kind);
DistributionKind distribution_kind_from_string(std::string_view text);

/// For lognormal, `mu`/`sigma` are the mean and standard deviation of log(x).
/// [lo, hi] is the truncation interval in the variable's own units.
struct DistributionSpec {
  std::string parameter;
  DistributionKind kind = DistributionKind::normal;
  double mu = 0.0;
  double sigma = 1.0;
  double lo = 0.0;
  double hi = 1.0;
};

/// A validated distribution truncated to [lo, hi] and renormalised.
class TruncatedDistribution {
 public:
  /// Throws DomainError unless sigma > 0, lo < hi (lo > 0 for lognormal) and
  /// the truncated mass is strictly positive.
  explicit TruncatedDistribution(DistributionSpec spec);

  const DistributionSpec& spec() const { return spec_; }

  /// Median of the untruncated distribution (mu or exp(mu)).
  double nominal_median() const;

  /// (F(x) - F(lo)) / (F(hi) - F(lo)); exactly 0 at lo and 1 at hi.
  /// DomainError outside [lo, hi].
  double cdf(double x) const;

  /// Inverse-CDF draw x = F^-1(F(lo) + U (F(hi) - F(lo))), clamped into [lo, hi].
  double sample(RandomStream& stream) const;
  /// Same map applied to a given uniform u in (0, 1).
  double quantile(double u) const;

 private:
  double standardize(double x) const;  // (t - mu) / sigma with t = x or log x
  double from_standard(double z) const;

  DistributionSpec spec_;
  double za_, zb_;
  bool upper_tail_;  // interval lies above the mean: work with survival functions
  double pa_, pb_;   // CDF (or SF when upper_tail_) at za_, zb_
};

using UncertaintyModel = std::vector<TruncatedDistribution>;

/// Table-2 distributions truncated at the space's bounds:
/// speed ~ N(20, 0.5), microwave ~ N(0.55, 0.08), foaming ~ LogN(log 0.08, 0.262).
UncertaintyModel extrusion_line_uncertainty(const ParameterSpace& space);

/// One draw per distribution, in order. Consumes exactly one uniform each.
Vec sample_uncertain(const UncertaintyModel& model, RandomStream& stream);

/// Vector of nominal medians.
Vec nominal_medians(const UncertaintyModel& model);

/// Convenience free function mirroring TruncatedDistribution::cdf.
inline double truncated_cdf(const TruncatedDistribution& d, double x) { return d.cdf(x); }

}  // namespace rpo
