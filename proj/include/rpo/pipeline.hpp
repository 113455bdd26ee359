// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <exception>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpo/distributions.hpp"
#include "rpo/geometry.hpp"
#include "rpo/objective.hpp"
#include "rpo/optimizers.hpp"
#include "rpo/random.hpp"
#include "rpo/rom.hpp"

namespace rpo {

/// Nearest-rank percentile: the ceil(q n)-th smallest value.
/// EmptyInputError on no values, DomainError unless 0 < q <= 1.
double percentile(std::span<const double> values, double q);

/// Order statistics reported for every cost or distance sample.
struct Quantiles {
  double min = 0.0, p1 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p99 = 0.0, max = 0.0;
  friend bool operator==(const Quantiles&, const Quantiles&) = default;
};

Quantiles summarize(std::span<const double> values);

/// Everything the robust search needs besides its options.
struct Problem {
  const RomModel* model = nullptr;
  GaugedGeometry geometry;
  CostSpec spec;
  UncertaintyModel uncertainty;
  /// Search box for the controls; the full controllable box when empty.
  std::optional<Box> controls;

  const ParameterSpace& space() const { return model->space(); }
  Box control_box() const { return controls ? *controls : space().controllable_box(); }
  /// DomainError if the cost spec, geometry, uncertainty or control box do
  /// not fit the model.
  void validate() const;
};

struct CandidateEvaluation {
  int run_id = 0;
  Vec controls;
  int samples = 0;
  /// Selection quantile q and the cost percentile at q.
  double q = 0.99;
  double risk = 0.0;
  Quantiles cost;
  double mean_cost = 0.0;
  /// End-of-line gauged distance (mm).
  Quantiles distance;
};

/// Per-sample results of one Monte-Carlo evaluation, in sample order.
struct McSamples {
  std::vector<double> cost;
  std::vector<double> distance;
};

/// Sample i draws its uncertain vector from derive(stream, "mc", i).
McSamples mc_samples(const Problem& problem, const Vec& c, int n, const RandomStream& stream,
                     int workers = 1);
CandidateEvaluation mc_evaluate(const Problem& problem, const Vec& c, int n,
                                const RandomStream& stream, int workers = 1, double q = 0.99);

enum class Method { bayes, simplex };
std::string_view to_string(Method m);
Method method_from_string(std::string_view text);

struct RestartOptions {
  BoOptions bo;
  NmOptions nm;
  int workers = 1;
};

/// Outcome of one restart. Failed runs keep their id and the error text.
struct RestartResult {
  int run_id = 0;
  Method method = Method::bayes;
  bool ok = false;
  std::string error;
  std::exception_ptr failure;
  Vec controls;
  /// Lowest noisy cost seen by the run (BO) or the final best-vertex cost (simplex).
  double observed_cost = 0.0;
  int evaluations = 0;
};

/// Restart k runs with derive(master, "restart", k): the objective draws from
/// its "objective" child, BO from its "bo" child and a simplex start point is
/// drawn uniformly in the box from its "start" child. Throws the first
/// failure only when every run fails.
std::vector<RestartResult> run_restarts(const Problem& problem, Method method, int n_restarts,
                                        const RandomStream& master,
                                        const RestartOptions& options = {});

struct Selection {
  /// One evaluation per successful candidate, in input order.
  std::vector<CandidateEvaluation> evaluations;
  std::size_t best = 0;
  const CandidateEvaluation& chosen() const { return evaluations[best]; }
};

/// MC-evaluates every successful candidate on the same draws (common random
/// numbers from `stream`) and picks the lowest risk, ties to the lowest run id.
Selection select_best(const std::vector<RestartResult>& candidates, const Problem& problem,
                      int n_mc, const RandomStream& stream, int workers = 1, double q = 0.99);

/// Successful simplex restart with the lowest observed cost, ties to the
/// lowest run id. EmptyInputError if none succeeded.
const RestartResult& simplex_representative(const std::vector<RestartResult>& candidates);

struct PercentileBands {
  std::vector<double> positions;  // m, ascending
  std::vector<Quantiles> bands;   // mm, one per position
};

/// 1 m grid on [0, 105] plus the three default stations.
std::vector<double> default_trajectory_positions();

/// Trajectory i uses the draw of derive(stream, "mc", i), as in mc_samples.
PercentileBands trajectory_bands(const Problem& problem, const Vec& c, int n,
                                 std::span<const double> positions, const RandomStream& stream,
                                 int workers = 1);

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);

void write_boxplot_csv(std::ostream& out, const std::vector<CandidateEvaluation>& evaluations);
void write_bands_csv(std::ostream& out, const PercentileBands& bands);
struct ComparisonRow {
  std::string method;
  double p99 = 0.0;
  double median = 0.0;
};
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
/// One row per restart: run_id, method, ok, observed cost, controls by name, error.
void write_candidates_csv(std::ostream& out, const ParameterSpace& space,
                          const std::vector<RestartResult>& restarts);
/// One row per Monte-Carlo sample: sample, cost, end_distance_mm.
void write_samples_csv(std::ostream& out, const McSamples& samples);

}  // namespace rpo
