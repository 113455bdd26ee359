// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rpo/types.hpp"

namespace rpo {

enum class Role { controllable, uncertain };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct ParameterSpec {
  std::string name;
  Role role = Role::controllable;
  double lower = 0.0;
  double upper = 1.0;
  std::string unit;
};

// Canonical parameter names, in line order.
namespace param {
inline constexpr std::string_view extrusion_speed = "extrusion_speed";
inline constexpr std::string_view pressure_big_cavity = "pressure_big_cavity";
inline constexpr std::string_view pressure_small_cavity = "pressure_small_cavity";
inline constexpr std::string_view rpm_ratio = "rpm_ratio";
inline constexpr std::string_view infrared_heat = "infrared_heat";
inline constexpr std::string_view microwave_heat = "microwave_heat";
inline constexpr std::string_view gas_oven_1_temperature = "gas_oven_1_temperature";
inline constexpr std::string_view gas_oven_2_temperature = "gas_oven_2_temperature";
inline constexpr std::string_view foaming_coefficient = "foaming_coefficient";
}  // namespace param

/// Ordered, immutable set of process parameters. Vectors exchanged with the
/// rest of the library ("full inputs") follow this order; control and
/// uncertain vectors follow the order of the respective role subsequence.
class ParameterSpace {
 public:
  ParameterSpace() = default;
  /// Throws DomainError on empty names, duplicates, or non-finite / inverted bounds.
  explicit ParameterSpace(std::vector<ParameterSpec> specs);

  /// The nine-parameter extrusion line: 6 controllable, 3 uncertain.
  static ParameterSpace extrusion_line();

  std::size_t size() const { return specs_.size(); }
  const std::vector<ParameterSpec>& specs() const { return specs_; }
  const ParameterSpec& operator[](std::size_t i) const { return specs_[i]; }

  /// Index of `name` in canonical order; throws DomainError if absent.
  std::size_t index_of(std::string_view name) const;
  bool contains(std::string_view name) const;

  const std::vector<std::size_t>& controllable_indices() const { return controllable_; }
  const std::vector<std::size_t>& uncertain_indices() const { return uncertain_; }

  Box full_box() const;
  Box controllable_box() const;
  Box uncertain_box() const;

  /// Component-wise midpoint of every bound interval.
  Vec midpoint() const;

  friend bool operator==(const ParameterSpace& a, const ParameterSpace& b);

 private:
  std::vector<ParameterSpec> specs_;
  std::vector<std::size_t> controllable_;
  std::vector<std::size_t> uncertain_;
};

/// Throws DomainError naming the first component of `p` outside its closed
/// interval (exact comparison).
void check_full(const ParameterSpace& space, const Vec& p);
void check_controls(const ParameterSpace& space, const Vec& c);
void check_uncertain(const ParameterSpace& space, const Vec& u);

/// (p_j - lower_j) / (upper_j - lower_j); DomainError if p is out of bounds.
Vec scale_to_unit(const ParameterSpace& space, const Vec& p);
/// Inverse of scale_to_unit; DomainError if any q_j is outside [0, 1].
Vec unscale_from_unit(const ParameterSpace& space, const Vec& q);

/// Unit scaling of a control vector relative to the controllable bounds.
Vec scale_controls_to_unit(const ParameterSpace& space, const Vec& c);

/// Interleave controls and uncertain values into canonical order.
Vec assemble_full(const ParameterSpace& space, const Vec& c, const Vec& u);

struct SplitInput {
  Vec controls;
  Vec uncertain;
};
SplitInput split_full(const ParameterSpace& space, const Vec& p);

}  // namespace rpo
