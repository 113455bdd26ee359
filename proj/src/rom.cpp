// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/rom.hpp"

#include <cmath>
#include <sstream>

#include "rpo/errors.hpp"

namespace rpo {

void GaugedGeometry::validate() const {
  if (!std::isfinite(x0_1) || !std::isfinite(y0_1) || !std::isfinite(x0_2) || !std::isfinite(y0_2))
    throw DomainError("gauged geometry coordinates must be finite");
  if (x0_1 == x0_2 && y0_1 == y0_2) throw DomainError("gauged points must be distinct");
}

void throw_extrapolation(double x, double lo, double hi) {
  std::ostringstream os;
  os.precision(17);
  os << "input " << x << " outside factor grid [" << lo << ", " << hi << "]";
  throw ExtrapolationError(os.str());
}

double interpolate(const Factor& f, double x) {
  return interpolate<double>(std::span<const double>(f.grid), std::span<const double>(f.values), x);
}

double evaluate_terms(const Expansion& terms, std::span<const double> x) {
  double sum = 0.0;
  for (const auto& term : terms) {
    double prod = term.weight;
    for (std::size_t n = 0; n < term.factors.size(); ++n) prod *= interpolate(term.factors[n], x[n]);
    sum += prod;
  }
  return sum;
}

void validate_terms(const Expansion& terms, std::span<const std::string> inputs,
                    std::string_view where) {
  const auto fail = [&](std::size_t m, const std::string& why) {
    std::ostringstream os;
    os << where << "[" << m << "]: " << why;
    throw FormatError(os.str());
  };
  for (std::size_t m = 0; m < terms.size(); ++m) {
    const Term& t = terms[m];
    if (!std::isfinite(t.weight)) fail(m, "weight is not finite");
    if (t.factors.size() != inputs.size()) {
      std::ostringstream os;
      os << "term has " << t.factors.size() << " factors, expected one per input (" << inputs.size()
         << ")";
      fail(m, os.str());
    }
    for (std::size_t n = 0; n < inputs.size(); ++n) {
      const Factor& f = t.factors[n];
      const std::string at = "factors[" + std::to_string(n) + "] ('" + f.input + "')";
      if (f.input != inputs[n]) fail(m, at + ": expected input '" + inputs[n] + "'");
      if (f.grid.size() < 2) fail(m, at + ": grid needs at least 2 nodes");
      if (f.values.size() != f.grid.size()) fail(m, at + ": values and grid lengths differ");
      for (std::size_t j = 0; j < f.grid.size(); ++j) {
        if (!std::isfinite(f.grid[j])) fail(m, at + ": grid node is not finite");
        if (!std::isfinite(f.values[j])) fail(m, at + ": value is not finite");
        if (j > 0 && !(f.grid[j] > f.grid[j - 1]))
          fail(m, at + ": grid is not strictly increasing at node " + std::to_string(j));
      }
    }
  }
}

RomModel::RomModel(double line_length, ParameterSpace space, GaugedGeometry geometry,
                   std::map<std::string, Expansion, std::less<>> outputs)
    : line_length_(line_length),
      space_(std::move(space)),
      geometry_(geometry),
      outputs_(std::move(outputs)) {
  if (!(line_length_ > 0.0) || !std::isfinite(line_length_))
    throw FormatError("line_length_m must be positive");
  geometry_.validate();
  inputs_.emplace_back(kPositionInput);
  for (const auto& s : space_.specs()) {
    if (s.name == kPositionInput) throw FormatError("parameter may not be named 'position'");
    inputs_.push_back(s.name);
  }
  for (const auto& [name, terms] : outputs_) {
    const std::string where = "outputs." + name;
    validate_terms(terms, inputs_, where);
    for (std::size_t m = 0; m < terms.size(); ++m) {
      for (std::size_t n = 0; n < inputs_.size(); ++n) {
        const auto& g = terms[m].factors[n].grid;
        if (g.front() != input_lower(n) || g.back() != input_upper(n)) {
          std::ostringstream os;
          os.precision(17);
          os << where << "[" << m << "]: factor '" << inputs_[n] << "' grid spans [" << g.front()
             << ", " << g.back() << "], expected [" << input_lower(n) << ", " << input_upper(n)
             << "]";
          throw FormatError(os.str());
        }
      }
    }
  }
}

bool RomModel::has_output(std::string_view name) const { return outputs_.find(name) != outputs_.end(); }

const Expansion& RomModel::terms(std::string_view name) const {
  const auto it = outputs_.find(name);
  if (it == outputs_.end()) throw UnknownOutputError("ROM has no output '" + std::string(name) + "'");
  return it->second;
}

double RomModel::input_lower(std::size_t n) const { return n == 0 ? 0.0 : space_[n - 1].lower; }
double RomModel::input_upper(std::size_t n) const { return n == 0 ? line_length_ : space_[n - 1].upper; }

RomModel RomModel::scaled(double s) const {
  auto outs = outputs_;
  for (auto& [name, terms] : outs)
    for (auto& t : terms) t.weight *= s;
  return RomModel(line_length_, space_, geometry_, std::move(outs));
}

bool operator==(const RomModel& a, const RomModel& b) {
  return a.line_length_ == b.line_length_ && a.space_ == b.space_ && a.geometry_ == b.geometry_ &&
         a.outputs_ == b.outputs_;
}

double evaluate(const RomModel& model, std::string_view name, double position, const Vec& p) {
  const Expansion& terms = model.terms(name);
  if (static_cast<std::size_t>(p.size()) + 1 != model.input_count())
    throw DomainError("parameter vector has wrong dimension");
  double x[64];
  if (model.input_count() > 64) throw DomainError("too many ROM inputs");
  x[0] = position;
  for (Eigen::Index j = 0; j < p.size(); ++j) x[j + 1] = p[j];
  return evaluate_terms(terms, std::span<const double>(x, model.input_count()));
}

std::vector<double> linspace(double lo, double hi, std::size_t nodes) {
  if (nodes < 2) throw DomainError("a grid needs at least 2 nodes");
  std::vector<double> g(nodes);
  const double n1 = static_cast<double>(nodes - 1);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double t = static_cast<double>(j) / n1;
    g[j] = (1.0 - t) * lo + t * hi;
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<std::vector<double>> default_grids(const ParameterSpace& space, double line_length,
                                               std::size_t position_nodes,
                                               std::size_t parameter_nodes) {
  std::vector<std::vector<double>> grids;
  grids.push_back(linspace(0.0, line_length, position_nodes));
  for (const auto& s : space.specs()) grids.push_back(linspace(s.lower, s.upper, parameter_nodes));
  return grids;
}

}  // namespace rpo
