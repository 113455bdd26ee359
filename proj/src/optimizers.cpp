// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpo/errors.hpp"
#include "rpo/low_discrepancy.hpp"

namespace rpo {

namespace {

// Bounded compass search in the unit cube maximising `score`. Moves only on
// strict improvement, so the result never scores below the start.
template <typename Score>
Vec polish(Score score, Vec x, double value, int max_evaluations) {
  double step = 0.05;
  int evals = 0;
  while (step > 1e-5 && evals < max_evaluations) {
    bool improved = false;
    for (Eigen::Index i = 0; i < x.size() && evals < max_evaluations; ++i) {
      for (double dir : {1.0, -1.0}) {
        Vec trial = x;
        trial[i] = std::clamp(x[i] + dir * step, 0.0, 1.0);
        if (trial[i] == x[i]) continue;
        const double v = score(trial);
        ++evals;
        if (v > value) {
          value = v;
          x = std::move(trial);
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

Mat candidate_set(Eigen::Index dim, RandomStream& stream, const BoOptions& options, const Mat& extra) {
  const Mat fresh = scrambled_halton(options.candidates, dim, stream);
  if (extra.rows() == 0) return fresh;
  Mat all(fresh.rows() + extra.rows(), dim);
  all << fresh, extra;
  return all;
}

GpFit fit_with_retry(const Mat& x, const Vec& y, const GpOptions& options,
                     const std::optional<GpHyperparameters>& warm) {
  try {
    return fit_gp(x, y, options, warm);
  } catch (const IllConditionedError&) {
    GpOptions retry = options;
    retry.noise_min *= 2.0;
    std::optional<GpHyperparameters> w = warm;
    if (w) w->noise_variance = std::max(w->noise_variance, retry.noise_min);
    return fit_gp(x, y, retry, w);
  }
}

// Rows of the `count` smallest observations (ties by evaluation order).
Mat incumbents(const Mat& x, const Vec& y, int count) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(y.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return y[a] < y[b]; });
  const auto k = std::min<Eigen::Index>(count, y.size());
  Mat out(k, x.cols());
  for (Eigen::Index i = 0; i < k; ++i) out.row(i) = x.row(order[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

Vec propose_next(const GpModel& gp, double f_best, RandomStream& stream, const BoOptions& options,
                 const Mat& extra) {
  const Mat cand = candidate_set(gp.inputs().cols(), stream, options, extra);
  const PosteriorBatch post = gp.posterior_batch(cand);
  Eigen::Index best = 0;
  double best_ei = -1.0;
  for (Eigen::Index i = 0; i < cand.rows(); ++i) {
    const double ei = expected_improvement(post.mean[i], std::sqrt(post.variance[i]), f_best);
    if (ei > best_ei) {
      best_ei = ei;
      best = i;
    }
  }
  const auto score = [&](const Vec& x) { return expected_improvement(gp, x, f_best); };
  return polish(score, cand.row(best).transpose(), best_ei, options.polish_evaluations);
}

Vec minimize_posterior_mean(const GpModel& gp, RandomStream& stream, const BoOptions& options,
                            const Mat& extra) {
  const Mat cand = candidate_set(gp.inputs().cols(), stream, options, extra);
  const PosteriorBatch post = gp.posterior_batch(cand);
  Eigen::Index best = 0;
  post.mean.minCoeff(&best);
  const auto score = [&](const Vec& x) { return -gp.posterior(x).mean; };
  return polish(score, cand.row(best).transpose(), -post.mean[best], options.polish_evaluations);
}

BoResult bayes_optimize(const Objective& objective, const Box& domain, const BoOptions& options,
                        const RandomStream& stream) {
  if (options.initial_design < 2) throw DomainError("initial design needs at least 2 points");
  if (options.budget < options.initial_design)
    throw DomainError("budget must be at least the initial design size");
  if (options.candidates < 1) throw DomainError("candidate set must be non-empty");
  const Eigen::Index dim = domain.dim();

  BoResult r;
  r.history_unit.resize(options.budget, dim);
  r.history_values.resize(options.budget);
  RandomStream design_stream = stream.derive("design", 0);
  const Mat design = scrambled_halton(options.initial_design, dim, design_stream);
  const auto observe = [&](const Vec& u) {
    r.history_unit.row(r.evaluations) = u.transpose();
    r.history_values[r.evaluations] = objective(domain.from_unit(u));
    ++r.evaluations;
  };
  for (Eigen::Index i = 0; i < design.rows(); ++i) observe(design.row(i).transpose());

  std::optional<GpHyperparameters> warm;
  const auto refit = [&] {
    const Mat x = r.history_unit.topRows(r.evaluations);
    const Vec y = r.history_values.head(r.evaluations);
    GpFit fit = fit_with_retry(x, y, options.gp, warm);
    warm = fit.model.hyperparameters();
    return std::move(fit.model);
  };
  while (r.evaluations < options.budget) {
    const GpModel gp = refit();
    RandomStream cs = stream.derive("acquisition", static_cast<std::uint64_t>(r.evaluations));
    const Mat inc = incumbents(r.history_unit.topRows(r.evaluations), r.history_values.head(r.evaluations),
                               options.incumbents);
    observe(propose_next(gp, gp.best_target(), cs, options, inc));
  }
  r.model.emplace(refit());
  RandomStream rs = stream.derive("recommend", 0);
  r.recommended_unit = minimize_posterior_mean(*r.model, rs, options, r.history_unit);
  r.recommended = domain.from_unit(r.recommended_unit);
  return r;
}

void NmOptions::validate() const {
  if (!(reflection > 0.0 && expansion > reflection && contraction > 0.0 && contraction < 1.0 &&
        shrink > 0.0 && shrink < 1.0))
    throw DomainError("Nelder-Mead coefficients must satisfy expansion > reflection > 0 and 0 < contraction, shrink < 1");
  if (!(tolerance > 0.0 && penalty >= 0.0 && initial_edge > 0.0 && initial_edge <= 0.5) ||
      max_iterations < 0 || max_evaluations < 0)
    throw DomainError("invalid Nelder-Mead tolerance, penalty, edge or limits");
}

std::string_view to_string(NmTermination t) {
  switch (t) {
    case NmTermination::tolerance: return "tolerance";
    case NmTermination::max_iterations: return "max_iterations";
    case NmTermination::max_evaluations: return "max_evaluations";
  }
  return "unknown";
}

NmResult nelder_mead(const Objective& objective, const Box& domain, const Vec& x0,
                     const NmOptions& options) {
  options.validate();
  if (x0.size() != domain.dim() || !domain.contains(x0)) throw DomainError("Nelder-Mead start outside the box");
  const Eigen::Index n = domain.dim();
  const Box unit = Box::unit(n);
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : 200 * static_cast<int>(n);
  const int max_eval = options.max_evaluations > 0 ? options.max_evaluations : 200 * static_cast<int>(n);

  NmResult r;
  const auto f = [&](const Vec& u) {
    const Vec p = unit.project(u);
    ++r.evaluations;
    const double v = objective(domain.from_unit(p));
    return v + options.penalty * (u - p).squaredNorm();
  };

  std::vector<Vec> x(static_cast<std::size_t>(n + 1));
  std::vector<double> fx(static_cast<std::size_t>(n + 1));
  x[0] = domain.to_unit(x0).cwiseMax(0.0).cwiseMin(1.0);
  fx[0] = f(x[0]);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec v = x[0];
    v[i] += v[i] + options.initial_edge <= 1.0 ? options.initial_edge : -options.initial_edge;
    x[static_cast<std::size_t>(i + 1)] = v;
    fx[static_cast<std::size_t>(i + 1)] = f(v);
  }

  std::vector<std::size_t> order(x.size());
  const auto sort = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
    std::vector<Vec> xs;
    std::vector<double> fs;
    for (auto i : order) {
      xs.push_back(x[i]);
      fs.push_back(fx[i]);
    }
    x = std::move(xs);
    fx = std::move(fs);
  };
  const auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) d = std::max(d, (x[i] - x[0]).lpNorm<Eigen::Infinity>());
    return d;
  };

  sort();
  r.reason = NmTermination::max_iterations;
  const auto w = static_cast<std::size_t>(n);
  while (true) {
    if (diameter() < options.tolerance) {
      r.reason = NmTermination::tolerance;
      break;
    }
    if (r.iterations >= max_iter) {
      r.reason = NmTermination::max_iterations;
      break;
    }
    if (r.evaluations >= max_eval) {
      r.reason = NmTermination::max_evaluations;
      break;
    }
    ++r.iterations;
    Vec c = Vec::Zero(n);
    for (std::size_t i = 0; i < w; ++i) c += x[i];
    c /= static_cast<double>(n);

    const Vec xr = c + options.reflection * (c - x[w]);
    const double fr = f(xr);
    bool shrink = false;
    if (fr < fx[0]) {
      const Vec xe = c + options.expansion * (xr - c);
      const double fe = f(xe);
      if (fe < fr) {
        x[w] = xe;
        fx[w] = fe;
      } else {
        x[w] = xr;
        fx[w] = fr;
      }
    } else if (fr < fx[w - 1]) {
      x[w] = xr;
      fx[w] = fr;
    } else if (fr < fx[w]) {
      const Vec xc = c + options.contraction * (xr - c);
      const double fc = f(xc);
      if (fc <= fr) {
        x[w] = xc;
        fx[w] = fc;
      } else {
        shrink = true;
      }
    } else {
      const Vec xcc = c + options.contraction * (x[w] - c);
      const double fcc = f(xcc);
      if (fcc < fx[w]) {
        x[w] = xcc;
        fx[w] = fcc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= w; ++i) {
        x[i] = x[0] + options.shrink * (x[i] - x[0]);
        fx[i] = f(x[i]);
      }
    }
    sort();
    r.best_trace.push_back(fx[0]);
  }

  const Vec best = unit.project(x[0]);
  r.x = domain.from_unit(best);
  r.value = fx[0] - options.penalty * (x[0] - best).squaredNorm();
  return r;
}

}  // namespace rpo
