// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rpo/errors.hpp"

namespace rpo {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) return std::numeric_limits<double>::quiet_NaN();
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
             45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
          133.14166789178437745) * r + 3.387132872796366608);
    const double den =
        (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
             21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
          42.313330701600911252) * r + 1.0);
    return q * num / den;
  }

  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
              0.24178072517745061177) * r + 1.27045825245236838258) * r +
            3.64784832476320460504) * r + 5.7694972214606914055) * r + 4.6303378461565452959) * r +
         1.42343711074968357734);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
              0.0151986665636164571966) * r + 0.14810397642748007459) * r +
            0.68976733498510000455) * r + 1.6763848301838038494) * r + 2.05319162663775882187) * r +
         1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              0.0012426609473880784386) * r + 0.026532189526576123093) * r +
            0.29656057182850489123) * r + 1.7848265399172913358) * r + 5.4637849111641143699) * r +
         6.6579046435011037772);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
              1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
            0.0148753612908506148525) * r + 0.13692988092273580531) * r + 0.59983220655588793769) * r +
         1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

std::string_view to_string(DistributionKind kind) {
  return kind == DistributionKind::normal ? "normal" : "lognormal";
}

DistributionKind distribution_kind_from_string(std::string_view text) {
  if (text == "normal") return DistributionKind::normal;
  if (text == "lognormal") return DistributionKind::lognormal;
  throw ConfigError("unknown distribution kind '" + std::string(text) + "'");
}

TruncatedDistribution::TruncatedDistribution(DistributionSpec spec) : spec_(std::move(spec)) {
  const auto fail = [&](const std::string& why) {
    throw DomainError("distribution for '" + spec_.parameter + "': " + why);
  };
  if (!(spec_.sigma > 0.0) || !std::isfinite(spec_.sigma)) fail("sigma must be positive");
  if (!std::isfinite(spec_.mu)) fail("mu must be finite");
  if (!(spec_.lo < spec_.hi) || !std::isfinite(spec_.lo) || !std::isfinite(spec_.hi))
    fail("truncation interval must satisfy lo < hi");
  if (spec_.kind == DistributionKind::lognormal && !(spec_.lo > 0.0))
    fail("lognormal truncation requires lo > 0");

  za_ = standardize(spec_.lo);
  zb_ = standardize(spec_.hi);
  upper_tail_ = za_ > 0.0;
  if (upper_tail_) {
    pa_ = normal_sf(za_);
    pb_ = normal_sf(zb_);
  } else {
    pa_ = normal_cdf(za_);
    pb_ = normal_cdf(zb_);
  }
  const double mass = upper_tail_ ? pa_ - pb_ : pb_ - pa_;
  if (!(mass > 0.0)) fail("truncated probability mass is zero");
}

double TruncatedDistribution::standardize(double x) const {
  const double t = spec_.kind == DistributionKind::lognormal ? std::log(x) : x;
  return (t - spec_.mu) / spec_.sigma;
}

double TruncatedDistribution::from_standard(double z) const {
  const double t = spec_.mu + spec_.sigma * z;
  return spec_.kind == DistributionKind::lognormal ? std::exp(t) : t;
}

double TruncatedDistribution::nominal_median() const {
  return spec_.kind == DistributionKind::lognormal ? std::exp(spec_.mu) : spec_.mu;
}

double TruncatedDistribution::cdf(double x) const {
  if (!(x >= spec_.lo && x <= spec_.hi)) {
    std::ostringstream os;
    os << "truncated_cdf argument " << x << " outside [" << spec_.lo << ", " << spec_.hi << "]";
    throw DomainError(os.str());
  }
  if (x == spec_.lo) return 0.0;
  if (x == spec_.hi) return 1.0;
  const double z = standardize(x);
  const double v = upper_tail_ ? (pa_ - normal_sf(z)) / (pa_ - pb_)
                               : (normal_cdf(z) - pa_) / (pb_ - pa_);
  return std::clamp(v, 0.0, 1.0);
}

double TruncatedDistribution::quantile(double u) const {
  double z;
  if (upper_tail_) {
    // survival-space inversion keeps resolution when both bounds sit in the upper tail
    z = -normal_quantile(pa_ - u * (pa_ - pb_));
  } else {
    z = normal_quantile(pa_ + u * (pb_ - pa_));
  }
  z = std::clamp(z, za_, zb_);
  return std::clamp(from_standard(z), spec_.lo, spec_.hi);
}

double TruncatedDistribution::sample(RandomStream& stream) const { return quantile(stream.uniform()); }

UncertaintyModel extrusion_line_uncertainty(const ParameterSpace& space) {
  const auto bounded = [&](std::string_view name, DistributionKind kind, double mu, double sigma) {
    const auto& s = space[space.index_of(name)];
    return TruncatedDistribution({s.name, kind, mu, sigma, s.lower, s.upper});
  };
  return {
      bounded(param::extrusion_speed, DistributionKind::normal, 20.0, 0.5),
      bounded(param::microwave_heat, DistributionKind::normal, 0.55, 0.08),
      bounded(param::foaming_coefficient, DistributionKind::lognormal, std::log(0.08), 0.262),
  };
}

Vec sample_uncertain(const UncertaintyModel& model, RandomStream& stream) {
  Vec u(static_cast<Eigen::Index>(model.size()));
  for (std::size_t k = 0; k < model.size(); ++k)
    u[static_cast<Eigen::Index>(k)] = model[k].sample(stream);
  return u;
}

Vec nominal_medians(const UncertaintyModel& model) {
  Vec m(static_cast<Eigen::Index>(model.size()));
  for (std::size_t k = 0; k < model.size(); ++k)
    m[static_cast<Eigen::Index>(k)] = model[k].nominal_median();
  return m;
}

}  // namespace rpo
