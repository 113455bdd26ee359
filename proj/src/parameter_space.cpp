// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/parameter_space.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "rpo/errors.hpp"

namespace rpo {

std::string_view to_string(Role role) {
  return role == Role::controllable ? "controllable" : "uncertain";
}

Role role_from_string(std::string_view text) {
  if (text == "controllable") return Role::controllable;
  if (text == "uncertain") return Role::uncertain;
  throw FormatError("unknown parameter role '" + std::string(text) + "'");
}

ParameterSpace::ParameterSpace(std::vector<ParameterSpec> specs) : specs_(std::move(specs)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& s = specs_[i];
    if (s.name.empty()) throw DomainError("parameter " + std::to_string(i) + " has an empty name");
    if (!seen.insert(s.name).second) throw DomainError("duplicate parameter name '" + s.name + "'");
    if (!std::isfinite(s.lower) || !std::isfinite(s.upper) || !(s.lower < s.upper)) {
      std::ostringstream os;
      os << "parameter '" << s.name << "' has invalid bounds [" << s.lower << ", " << s.upper << "]";
      throw DomainError(os.str());
    }
    (s.role == Role::controllable ? controllable_ : uncertain_).push_back(i);
  }
}

ParameterSpace ParameterSpace::extrusion_line() {
  using enum Role;
  return ParameterSpace({
      {std::string(param::extrusion_speed), uncertain, 15.0, 25.0, "m/min"},
      {std::string(param::pressure_big_cavity), controllable, 1200.0, 1800.0, "Pa"},
      {std::string(param::pressure_small_cavity), controllable, 100.0, 700.0, "Pa"},
      // 0.335 +/- 10 %
      {std::string(param::rpm_ratio), controllable, 0.3015, 0.3685, "-"},
      {std::string(param::infrared_heat), controllable, 0.80, 1.10, "-"},
      {std::string(param::microwave_heat), uncertain, 0.10, 1.00, "-"},
      {std::string(param::gas_oven_1_temperature), controllable, 280.0, 480.0, "degC"},
      {std::string(param::gas_oven_2_temperature), controllable, 250.0, 450.0, "degC"},
      {std::string(param::foaming_coefficient), uncertain, 0.025, 0.230, "-"},
  });
}

std::size_t ParameterSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i)
    if (specs_[i].name == name) return i;
  throw DomainError("unknown parameter '" + std::string(name) + "'");
}

bool ParameterSpace::contains(std::string_view name) const {
  for (const auto& s : specs_)
    if (s.name == name) return true;
  return false;
}

namespace {

Box box_of(const std::vector<ParameterSpec>& specs, const std::vector<std::size_t>& idx) {
  Box b{Vec(static_cast<Eigen::Index>(idx.size())), Vec(static_cast<Eigen::Index>(idx.size()))};
  for (std::size_t k = 0; k < idx.size(); ++k) {
    b.lower[static_cast<Eigen::Index>(k)] = specs[idx[k]].lower;
    b.upper[static_cast<Eigen::Index>(k)] = specs[idx[k]].upper;
  }
  return b;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

void check_against(const std::vector<ParameterSpec>& specs, const std::vector<std::size_t>& idx,
                   const Vec& x, const char* what) {
  if (static_cast<std::size_t>(x.size()) != idx.size()) {
    std::ostringstream os;
    os << what << " has " << x.size() << " components, expected " << idx.size();
    throw DomainError(os.str());
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& s = specs[idx[k]];
    const double v = x[static_cast<Eigen::Index>(k)];
    if (!(v >= s.lower && v <= s.upper)) {
      std::ostringstream os;
      os.precision(17);
      os << "parameter '" << s.name << "' = " << v << " outside [" << s.lower << ", " << s.upper
         << "]";
      throw DomainError(os.str());
    }
  }
}

}  // namespace

Box ParameterSpace::full_box() const { return box_of(specs_, iota(specs_.size())); }
Box ParameterSpace::controllable_box() const { return box_of(specs_, controllable_); }
Box ParameterSpace::uncertain_box() const { return box_of(specs_, uncertain_); }

Vec ParameterSpace::midpoint() const {
  const Box b = full_box();
  return 0.5 * (b.lower + b.upper);
}

bool operator==(const ParameterSpace& a, const ParameterSpace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.name != y.name || x.role != y.role || x.lower != y.lower || x.upper != y.upper ||
        x.unit != y.unit)
      return false;
  }
  return true;
}

void check_full(const ParameterSpace& space, const Vec& p) {
  check_against(space.specs(), iota(space.size()), p, "full input");
}

void check_controls(const ParameterSpace& space, const Vec& c) {
  check_against(space.specs(), space.controllable_indices(), c, "control vector");
}

void check_uncertain(const ParameterSpace& space, const Vec& u) {
  check_against(space.specs(), space.uncertain_indices(), u, "uncertain vector");
}

Vec scale_to_unit(const ParameterSpace& space, const Vec& p) {
  check_full(space, p);
  return space.full_box().to_unit(p);
}

Vec unscale_from_unit(const ParameterSpace& space, const Vec& q) {
  if (static_cast<std::size_t>(q.size()) != space.size())
    throw DomainError("unit vector has wrong dimension");
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    if (!(q[j] >= 0.0 && q[j] <= 1.0)) {
      std::ostringstream os;
      os << "unit coordinate " << j << " = " << q[j] << " outside [0, 1]";
      throw DomainError(os.str());
    }
  }
  return space.full_box().from_unit(q);
}

Vec scale_controls_to_unit(const ParameterSpace& space, const Vec& c) {
  check_controls(space, c);
  return space.controllable_box().to_unit(c);
}

Vec assemble_full(const ParameterSpace& space, const Vec& c, const Vec& u) {
  check_controls(space, c);
  check_uncertain(space, u);
  Vec p(static_cast<Eigen::Index>(space.size()));
  const auto& ci = space.controllable_indices();
  const auto& ui = space.uncertain_indices();
  for (std::size_t k = 0; k < ci.size(); ++k)
    p[static_cast<Eigen::Index>(ci[k])] = c[static_cast<Eigen::Index>(k)];
  for (std::size_t k = 0; k < ui.size(); ++k)
    p[static_cast<Eigen::Index>(ui[k])] = u[static_cast<Eigen::Index>(k)];
  return p;
}

SplitInput split_full(const ParameterSpace& space, const Vec& p) {
  check_full(space, p);
  SplitInput out{Vec(static_cast<Eigen::Index>(space.controllable_indices().size())),
                 Vec(static_cast<Eigen::Index>(space.uncertain_indices().size()))};
  const auto& ci = space.controllable_indices();
  const auto& ui = space.uncertain_indices();
  for (std::size_t k = 0; k < ci.size(); ++k)
    out.controls[static_cast<Eigen::Index>(k)] = p[static_cast<Eigen::Index>(ci[k])];
  for (std::size_t k = 0; k < ui.size(); ++k)
    out.uncertain[static_cast<Eigen::Index>(k)] = p[static_cast<Eigen::Index>(ui[k])];
  return out;
}

}  // namespace rpo
