// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/gp.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "rpo/distributions.hpp"
#include "rpo/errors.hpp"
#include "rpo/low_discrepancy.hpp"

namespace rpo {

namespace {

Mat kernel_matrix(const Mat& x, const GpHyperparameters& h) {
  const Eigen::Index n = x.rows();
  const Mat scaled = x * h.lengthscales.cwiseInverse().asDiagonal();
  Mat k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = h.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = h.signal_variance * matern52((scaled.row(i) - scaled.row(j)).norm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Mat cross_kernel(const Mat& a, const Mat& b, const GpHyperparameters& h) {
  const Vec inv = h.lengthscales.cwiseInverse();
  const Mat sa = a * inv.asDiagonal(), sb = b * inv.asDiagonal();
  // Squared distances via the expansion |a|^2 + |b|^2 - 2 a.b, clamped at zero.
  const Vec na = sa.rowwise().squaredNorm(), nb = sb.rowwise().squaredNorm();
  Mat d2 = (-2.0 * sa * sb.transpose()).colwise() + na;
  d2.rowwise() += nb.transpose();
  return d2.cwiseMax(0.0).cwiseSqrt().unaryExpr([&](double r) { return h.signal_variance * matern52(r); });
}

// Factorises k + (noise + jitter) I, escalating the jitter by decades.
bool factorise(Mat k, double noise, double max_jitter, Eigen::LLT<Mat>& llt, double& jitter) {
  k.diagonal().array() += noise;
  llt.compute(k);
  if (llt.info() == Eigen::Success) {
    jitter = 0.0;
    return true;
  }
  for (double j = 1e-12; j <= max_jitter * (1 + 1e-9); j *= 10.0) {
    Mat kj = k;
    kj.diagonal().array() += j;
    llt.compute(kj);
    if (llt.info() == Eigen::Success) {
      jitter = j;
      return true;
    }
  }
  return false;
}

struct Standardised {
  Vec z;
  double mean, scale;
};

Standardised standardise(const Vec& y) {
  const double mean = y.mean();
  const double var = (y.array() - mean).square().mean();
  const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
  return {(y.array() - mean) / scale, mean, scale};
}

Vec transformed(const Vec& y, bool log_transform) {
  if (!log_transform) return y;
  if ((y.array() <= -1.0).any()) throw DomainError("log1p transform needs targets > -1");
  return y.array().log1p();
}

// Search coordinates: log lengthscales, log signal variance, log noise variance.
struct LogBox {
  Vec lo, hi;
};

LogBox log_box(Eigen::Index dim, const GpOptions& o) {
  LogBox b{Vec(dim + 2), Vec(dim + 2)};
  b.lo.head(dim).setConstant(std::log(o.lengthscale_min));
  b.hi.head(dim).setConstant(std::log(o.lengthscale_max));
  b.lo[dim] = std::log(o.signal_min);
  b.hi[dim] = std::log(o.signal_max);
  b.lo[dim + 1] = std::log(o.noise_min);
  b.hi[dim + 1] = std::log(o.noise_max);
  return b;
}

GpHyperparameters from_log(const Vec& t, Eigen::Index dim) {
  return {t.head(dim).array().exp(), std::exp(t[dim]), std::exp(t[dim + 1])};
}

Vec to_log(const GpHyperparameters& h, const LogBox& box) {
  const Eigen::Index dim = h.lengthscales.size();
  Vec t(dim + 2);
  t.head(dim) = h.lengthscales.array().log();
  t[dim] = std::log(h.signal_variance);
  t[dim + 1] = std::log(h.noise_variance);
  return t.cwiseMax(box.lo).cwiseMin(box.hi);
}

// Compass search maximising f inside the box; returns the best value found.
template <typename F>
double compass_search(F f, Vec& t, double value, const LogBox& box, int max_evaluations) {
  double step = 1.0;
  int evals = 0;
  while (step > 1e-3 && evals < max_evaluations) {
    bool improved = false;
    for (Eigen::Index i = 0; i < t.size() && evals < max_evaluations; ++i) {
      for (double dir : {1.0, -1.0}) {
        Vec trial = t;
        trial[i] = std::clamp(t[i] + dir * step, box.lo[i], box.hi[i]);
        if (trial[i] == t[i]) continue;
        const double v = f(trial);
        ++evals;
        if (v > value) {
          value = v;
          t = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return value;
}

}  // namespace

GpModel::GpModel(Mat x, Vec y, GpHyperparameters hyper, const GpOptions& options)
    : x_(std::move(x)), y_(std::move(y)), hyper_(std::move(hyper)),
      log_transform_(options.log_transform) {
  if (x_.rows() != y_.size() || x_.rows() < 1) throw DomainError("GP needs matching, non-empty x and y");
  if (hyper_.lengthscales.size() != x_.cols()) throw DomainError("one lengthscale per input dimension");
  const Standardised s = standardise(transformed(y_, log_transform_));
  mean_ = s.mean;
  scale_ = s.scale;
  if (!factorise(kernel_matrix(x_, hyper_), hyper_.noise_variance, options.max_jitter, llt_, jitter_))
    throw IllConditionedError("GP covariance is not positive definite even with maximum jitter");
  alpha_ = llt_.solve(s.z);
  const double n = static_cast<double>(x_.rows());
  const Mat& l = llt_.matrixLLT();
  lml_ = -0.5 * s.z.dot(alpha_) - l.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

Posterior GpModel::posterior(const Vec& x) const {
  const PosteriorBatch b = posterior_batch(Mat(x.transpose()));
  return {b.mean[0], b.variance[0]};
}

PosteriorBatch GpModel::posterior_batch(const Mat& x) const {
  const Mat ks = cross_kernel(x, x_, hyper_);  // m x n
  PosteriorBatch out;
  out.mean = (ks * alpha_).array() * scale_ + mean_;
  const Mat v = llt_.matrixL().solve(ks.transpose());  // n x m
  out.variance = ((hyper_.signal_variance - v.colwise().squaredNorm().transpose().array()).max(0.0) *
                  (scale_ * scale_))
                     .matrix();
  return out;
}

double GpModel::best_target() const { return transformed(y_, log_transform_).minCoeff(); }

double gp_log_marginal_likelihood(const Mat& x, const Vec& z, const GpHyperparameters& hyper,
                                  double max_jitter) {
  Eigen::LLT<Mat> llt;
  double jitter = 0.0;
  if (!factorise(kernel_matrix(x, hyper), hyper.noise_variance, max_jitter, llt, jitter))
    return -std::numeric_limits<double>::infinity();
  const Vec alpha = llt.solve(z);
  const Mat& l = llt.matrixLLT();
  return -0.5 * z.dot(alpha) - l.diagonal().array().log().sum() -
         0.5 * static_cast<double>(x.rows()) * std::log(2.0 * std::numbers::pi);
}

GpFit fit_gp(const Mat& x, const Vec& y, const GpOptions& options,
             const std::optional<GpHyperparameters>& warm_start) {
  if (x.rows() < 2) throw DomainError("GP fit needs at least 2 points");
  if (x.rows() != y.size()) throw DomainError("GP inputs and targets differ in length");
  if (!y.allFinite()) throw DomainError("GP targets must be finite");
  if (!x.allFinite() || x.minCoeff() < 0.0 || x.maxCoeff() > 1.0)
    throw DomainError("GP inputs must lie in the unit cube");
  const Eigen::Index dim = x.cols();
  const LogBox box = log_box(dim, options);
  const Vec z = standardise(transformed(y, options.log_transform)).z;
  const auto lml = [&](const Vec& t) {
    return gp_log_marginal_likelihood(x, z, from_log(t, dim), options.max_jitter);
  };

  std::vector<Vec> starts;
  const Mat unit = halton(options.multistarts, dim + 2);
  for (Eigen::Index i = 0; i < unit.rows(); ++i)
    starts.push_back(box.lo + (box.hi - box.lo).cwiseProduct(unit.row(i).transpose()));
  if (warm_start) starts.push_back(to_log(*warm_start, box));

  std::vector<double> values;
  for (const auto& t : starts) values.push_back(lml(t));
  std::vector<std::size_t> order(starts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  Vec best = starts[order[0]];
  double best_value = values[order[0]];
  const auto refined = std::min<std::size_t>(static_cast<std::size_t>(std::max(options.refined_starts, 1)), order.size());
  for (std::size_t r = 0; r < refined; ++r) {
    Vec t = starts[order[r]];
    if (!std::isfinite(values[order[r]])) continue;
    const double v = compass_search(lml, t, values[order[r]], box, options.max_evaluations);
    if (v > best_value) {
      best_value = v;
      best = t;
    }
  }
  if (!std::isfinite(best_value))
    throw IllConditionedError("GP covariance is not positive definite at any start");
  return {GpModel(x, y, from_log(best, dim), options), std::move(values)};
}

double expected_improvement(double mu, double sigma, double f_best) {
  const double d = f_best - mu;
  if (!(sigma > 0.0)) return std::max(d, 0.0);
  // EI = max(d, 0) + sigma (phi(a) - a Q(a)) with a = |d| / sigma.
  const double a = std::abs(d) / sigma;
  double tail;
  if (a < 3.0) {
    tail = sigma * (normal_pdf(a) - a * normal_sf(a));
  } else {
    // Q(a) = phi(a) / (a + r), r from the Laplace continued fraction, so
    // phi(a) - a Q(a) = phi(a) r / (a + r) without cancellation.
    double r = 0.0;
    for (int k = 120; k >= 1; --k) r = k / (a + r);
    tail = normal_pdf(a) * (sigma * (r / (a + r)));
  }
  return d > 0.0 ? d + tail : tail;
}

double expected_improvement(const GpModel& gp, const Vec& x, double f_best) {
  const Posterior p = gp.posterior(x);
  return expected_improvement(p.mean, std::sqrt(p.variance), f_best);
}

}  // namespace rpo
