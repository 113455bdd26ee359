// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "rpo/gp.hpp"
#include "rpo/random.hpp"
#include "rpo/types.hpp"

namespace rpo {

/// Objective over the optimisation domain (physical units). Stochastic
/// objectives own their random stream.
using Objective = std::function<double(const Vec&)>;

struct BoOptions {
  int budget = 100;
  int initial_design = 8;
  /// Quasi-random candidates scored per acquisition step.
  int candidates = 4096;
  /// Best observed points added to the candidate set.
  int incumbents = 10;
  /// Objective evaluations of the bounded pattern-search polish.
  int polish_evaluations = 200;
  GpOptions gp;
};

struct BoResult {
  Mat history_unit;  // budget x dim, unit-cube points in evaluation order
  Vec history_values;
  Vec recommended_unit;
  Vec recommended;  // in the domain
  std::optional<GpModel> model;
  int evaluations = 0;
};

/// Scrambled-Halton initial design, then one GP refit and one EI-maximising
/// proposal per evaluation until `budget` evaluations. The recommendation
/// minimises the final posterior mean over fresh candidates plus the history.
/// An IllConditionedError from a GP fit is retried once with twice the noise
/// floor. Errors from the objective propagate.
BoResult bayes_optimize(const Objective& objective, const Box& domain, const BoOptions& options,
                        const RandomStream& stream);

/// EI maximiser over `options.candidates` scrambled-Halton points from
/// `stream` plus `extra` rows, polished by bounded compass search. The result
/// has EI no smaller than any candidate's.
Vec propose_next(const GpModel& gp, double f_best, RandomStream& stream, const BoOptions& options,
                 const Mat& extra = Mat());

/// Posterior-mean minimiser over the same candidate scheme.
Vec minimize_posterior_mean(const GpModel& gp, RandomStream& stream, const BoOptions& options,
                            const Mat& extra = Mat());

struct NmOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  /// 0 selects 200 x dimension.
  int max_iterations = 0;
  int max_evaluations = 0;
  /// Stop when every vertex is within this unit-cube distance of the best one.
  double tolerance = 1e-4;
  /// Out-of-box points cost f(projection) + penalty * squared unit distance to the box.
  double penalty = 1e3;
  /// Edge of the initial axis-aligned simplex in unit-cube coordinates.
  double initial_edge = 0.1;

  /// Throws DomainError unless 0 < contraction < 1, 0 < shrink < 1,
  /// expansion > reflection > 0 and the rest is positive.
  void validate() const;
};

enum class NmTermination { tolerance, max_iterations, max_evaluations };
std::string_view to_string(NmTermination t);

struct NmResult {
  Vec x;  // in the domain
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  NmTermination reason = NmTermination::tolerance;
  /// Best vertex value after every iteration.
  std::vector<double> best_trace;
};

/// Nelder-Mead in unit-cube coordinates of `domain`, started at x0.
NmResult nelder_mead(const Objective& objective, const Box& domain, const Vec& x0,
                     const NmOptions& options = {});

}  // namespace rpo
