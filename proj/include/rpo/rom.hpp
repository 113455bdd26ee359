// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpo/geometry.hpp"
#include "rpo/parameter_space.hpp"
#include "rpo/types.hpp"

namespace rpo {

inline constexpr std::string_view kPositionInput = "position";
inline constexpr int kRomFormatVersion = 1;

namespace output {
inline constexpr std::string_view dx1 = "dx1";
inline constexpr std::string_view dy1 = "dy1";
inline constexpr std::string_view dx2 = "dx2";
inline constexpr std::string_view dy2 = "dy2";
}  // namespace output

/// One-dimensional piecewise-linear function tabulated on a strictly
/// increasing grid.
struct Factor {
  std::string input;
  std::vector<double> grid;
  std::vector<double> values;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// weight * prod_n factors[n](x_n); one factor per model input, in input order.
struct Term {
  double weight = 1.0;
  std::vector<Factor> factors;

  friend bool operator==(const Term&, const Term&) = default;
};

using Expansion = std::vector<Term>;

[[noreturn]] void throw_extrapolation(double x, double lo, double hi);

/// Piecewise-linear interpolation with no extrapolation: throws
/// ExtrapolationError when x is outside [grid.front(), grid.back()] or NaN.
/// Returns the tabulated value exactly at grid nodes.
template <typename Scalar>
Scalar interpolate(std::span<const Scalar> grid, std::span<const Scalar> values, Scalar x) {
  if (!(x >= grid.front() && x <= grid.back())) throw_extrapolation(x, grid.front(), grid.back());
  auto hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), x) - grid.begin());
  if (hi == grid.size()) hi = grid.size() - 1;
  const std::size_t lo = hi - 1;
  if (x == grid[lo]) return values[lo];
  if (x == grid[hi]) return values[hi];
  const Scalar t = (x - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

double interpolate(const Factor& f, double x);

/// sum_m weight_m * prod_n interp(factor_{m,n}, x_n). `x` holds one value per
/// factor, in factor order.
double evaluate_terms(const Expansion& terms, std::span<const double> x);

/// Checks the one-factor-per-input structure and factor invariants
/// (strictly increasing grid of >= 2 nodes, matching finite values, finite
/// weight). `inputs` lists the expected factor input names in order.
/// Throws FormatError describing the first violation, prefixed by `where`.
void validate_terms(const Expansion& terms, std::span<const std::string> inputs,
                    std::string_view where);

/// Separable reduced-order model. Inputs are the line position (m) followed by
/// the parameters of `space`; every factor grid spans exactly its input range.
class RomModel {
 public:
  RomModel(double line_length, ParameterSpace space, GaugedGeometry geometry,
           std::map<std::string, Expansion, std::less<>> outputs);

  double line_length() const { return line_length_; }
  const ParameterSpace& space() const { return space_; }
  const GaugedGeometry& geometry() const { return geometry_; }
  const std::map<std::string, Expansion, std::less<>>& outputs() const { return outputs_; }
  /// Input names: "position" followed by the parameter names.
  const std::vector<std::string>& input_names() const { return inputs_; }
  std::size_t input_count() const { return inputs_.size(); }

  bool has_output(std::string_view name) const;
  /// Throws UnknownOutputError.
  const Expansion& terms(std::string_view name) const;

  /// Input range of input n (0 = position).
  double input_lower(std::size_t n) const;
  double input_upper(std::size_t n) const;

  /// Returns a copy where every weight of every output is multiplied by s.
  RomModel scaled(double s) const;

  friend bool operator==(const RomModel&, const RomModel&);

 private:
  double line_length_;
  ParameterSpace space_;
  GaugedGeometry geometry_;
  std::map<std::string, Expansion, std::less<>> outputs_;
  std::vector<std::string> inputs_;
};

/// Evaluate output `name` at a line position and full parameter vector.
/// Errors: UnknownOutputError, ExtrapolationError (position or parameter
/// outside the factor grids, which coincide with the declared ranges).
double evaluate(const RomModel& model, std::string_view name, double position, const Vec& p);

/// Equispaced grid of `nodes` points on [lo, hi] with exact endpoints.
std::vector<double> linspace(double lo, double hi, std::size_t nodes);

/// Default grids: `position_nodes` on [0, line_length], `parameter_nodes` per parameter.
std::vector<std::vector<double>> default_grids(const ParameterSpace& space, double line_length,
                                               std::size_t position_nodes = 64,
                                               std::size_t parameter_nodes = 17);

}  // namespace rpo
