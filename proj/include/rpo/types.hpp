// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

namespace rpo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Axis-aligned box `lower <= x <= upper`.
struct Box {
  Vec lower;
  Vec upper;

  Eigen::Index dim() const { return lower.size(); }

  static Box unit(Eigen::Index dim) { return {Vec::Zero(dim), Vec::Ones(dim)}; }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x) const {
    return ((x.array() >= lower.array()) && (x.array() <= upper.array())).all();
  }

  template <typename Derived>
  Vec project(const Eigen::MatrixBase<Derived>& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }

  /// Maps the unit cube onto the box. The result is clamped to the box so
  /// that q = 1 lands exactly on `upper` despite rounding.
  template <typename Derived>
  Vec from_unit(const Eigen::MatrixBase<Derived>& q) const {
    return (lower + (upper - lower).cwiseProduct(q)).cwiseMax(lower).cwiseMin(upper);
  }

  template <typename Derived>
  Vec to_unit(const Eigen::MatrixBase<Derived>& x) const {
    return (x - lower).cwiseQuotient(upper - lower);
  }
};

}  // namespace rpo
