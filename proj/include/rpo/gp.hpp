// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>

#include "rpo/types.hpp"

namespace rpo {

/// Matern-5/2 correlation at scaled distance r >= 0.
template <typename Scalar>
Scalar matern52(Scalar r) {
  const Scalar a = std::sqrt(Scalar(5)) * r;
  return (Scalar(1) + a + a * a / Scalar(3)) * std::exp(-a);
}

/// ARD Matern-5/2 covariance s2 * matern52(|(x - y) / l|).
template <typename DerivedA, typename DerivedB, typename DerivedL>
typename DerivedA::Scalar ard_matern52(const Eigen::MatrixBase<DerivedA>& x,
                                       const Eigen::MatrixBase<DerivedB>& y,
                                       const Eigen::MatrixBase<DerivedL>& lengthscales,
                                       typename DerivedA::Scalar signal_variance) {
  const auto r = (x - y).cwiseQuotient(lengthscales).norm();
  return signal_variance * matern52(r);
}

/// Kernel hyperparameters in standardised target units.
struct GpHyperparameters {
  Vec lengthscales;
  double signal_variance = 1.0;
  double noise_variance = 1e-6;
};

struct GpOptions {
  double lengthscale_min = 1e-2, lengthscale_max = 10.0;
  double signal_min = 1e-4, signal_max = 1e2;
  double noise_min = 1e-8, noise_max = 1.0;
  /// Largest diagonal jitter tried when the factorisation fails.
  double max_jitter = 1e-6;
  /// Fixed quasi-random starting points of the likelihood search.
  int multistarts = 8;
  /// Best starts (by initial likelihood) that are refined by pattern search.
  int refined_starts = 2;
  /// Likelihood evaluations per pattern search.
  int max_evaluations = 150;
  /// Model log1p(y) instead of y.
  bool log_transform = false;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

struct PosteriorBatch {
  Vec mean;
  Vec variance;
};

/// Gaussian-process regression on inputs in the unit cube.
///
/// Targets are optionally transformed (log1p), then standardised; the prior
/// mean is zero in standardised units. Posterior moments are reported in the
/// (transformed) target units; the variance is that of the latent function,
/// without observation noise.
class GpModel {
 public:
  /// Conditions on (x, y) with fixed hyperparameters. Adds jitter 1e-12,
  /// 1e-11, ... up to max_jitter when the Cholesky factorisation fails;
  /// throws IllConditionedError beyond that.
  GpModel(Mat x, Vec y, GpHyperparameters hyper, const GpOptions& options = {});

  Posterior posterior(const Vec& x) const;
  /// One query point per row.
  PosteriorBatch posterior_batch(const Mat& x) const;

  const Mat& inputs() const { return x_; }
  const Vec& targets() const { return y_; }
  const GpHyperparameters& hyperparameters() const { return hyper_; }
  double target_mean() const { return mean_; }
  double target_scale() const { return scale_; }
  double jitter() const { return jitter_; }
  bool log_transform() const { return log_transform_; }
  double log_marginal_likelihood() const { return lml_; }

  /// Maps an observation into the units of the posterior.
  double transform(double y) const { return log_transform_ ? std::log1p(y) : y; }
  /// Smallest observed target, in posterior units.
  double best_target() const;

 private:
  Mat x_;
  Vec y_;
  GpHyperparameters hyper_;
  bool log_transform_ = false;
  double mean_ = 0.0, scale_ = 1.0, jitter_ = 0.0, lml_ = 0.0;
  Eigen::LLT<Mat> llt_;
  Vec alpha_;
};

/// Log marginal likelihood of standardised targets z under `hyper`; -inf when
/// the factorisation fails at every jitter level.
double gp_log_marginal_likelihood(const Mat& x, const Vec& z, const GpHyperparameters& hyper,
                                  double max_jitter = 1e-6);

struct GpFit {
  GpModel model;
  /// Log marginal likelihood at each starting point (fixed starts, then the warm start).
  std::vector<double> start_log_likelihoods;
};

/// Maximises the log marginal likelihood over log-hyperparameters inside the
/// option bounds: fixed Halton starts plus `warm_start`, then compass search
/// from the best starts. Requires n >= 2, x in the unit cube, finite y.
GpFit fit_gp(const Mat& x, const Vec& y, const GpOptions& options = {},
             const std::optional<GpHyperparameters>& warm_start = std::nullopt);

/// (f_best - mu) Phi(z) + sigma phi(z), z = (f_best - mu) / sigma; the limit
/// max(f_best - mu, 0) at sigma = 0. Never negative.
double expected_improvement(double mu, double sigma, double f_best);
double expected_improvement(const GpModel& gp, const Vec& x, double f_best);

}  // namespace rpo
