// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpo/rom.hpp"
#include "rpo/types.hpp"

namespace rpo {

/// Tabular training data: one row per (input point, output) pair.
struct TrainingDataset {
  std::vector<std::string> input_names;  // "position", then parameter names
  Mat inputs;                            // rows x input_names.size()
  std::vector<std::string> output_names;
  std::vector<int> output_of_row;        // index into output_names
  Vec values;
  std::string provenance;

  Eigen::Index rows() const { return inputs.rows(); }

  struct Slice {
    Mat x;
    Vec y;
  };
  /// All rows of one output. Throws EmptyDatasetError if there are none.
  Slice slice(std::string_view output) const;
};

struct AlsOptions {
  std::size_t terms = 8;
  std::size_t max_sweeps = 100;
  /// Stop when the relative loss decrease of a sweep falls below this.
  double tol = 1e-10;
  /// Line-search extrapolation between sweeps (accepted only if it lowers the loss).
  bool extrapolate = true;
  /// Levenberg-Marquardt iterations over all factor values after the sweeps.
  /// Each builds a dense normal matrix of size (terms x total nodes)^2.
  std::size_t refine_iterations = 0;
};

struct AlsResult {
  Expansion terms;
  double rmse = 0.0;
  /// Training mean squared error: initial value, then after every sweep and
  /// every accepted refinement step. Non-increasing.
  std::vector<double> loss_history;
  std::size_t sweeps = 0;
  std::size_t refine_steps = 0;
};

/// Fits sum_m w_m prod_n f_{m,n}(x_n) with piecewise-linear factors on
/// `grids` by alternating least squares: each block update re-solves the
/// linear least-squares problem in one input's node values for all terms
/// jointly. Rank-deficient blocks get a ridge of 1e-10 x mean diagonal.
///
/// Errors: EmptyDatasetError, DomainError (bad grids, data outside a grid),
/// SingularSolveError (a block with an all-zero normal matrix),
/// NumericalError (the training loss is not finite, e.g. targets near 1e300).
AlsResult fit_als(const Mat& x, const Vec& y, std::span<const std::string> input_names,
                  const std::vector<std::vector<double>>& grids, const AlsOptions& options = {});

AlsResult fit_als(const TrainingDataset& data, std::string_view output,
                  const std::vector<std::vector<double>>& grids, const AlsOptions& options = {});

struct RomFit {
  RomModel model;
  std::map<std::string, double> rmse;
};

/// Fits every output present in `data` (or only `outputs`, when non-empty).
/// Grids must span exactly the model input ranges.
RomFit fit_rom(const TrainingDataset& data, const ParameterSpace& space, double line_length,
               const GaugedGeometry& geometry, const std::vector<std::vector<double>>& grids,
               const AlsOptions& options = {}, const std::vector<std::string>& outputs = {});

}  // namespace rpo
