// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <ostream>

#include "rpo/errors.hpp"
#include "rpo/parallel.hpp"

namespace rpo {

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw EmptyInputError("percentile of no values");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("percentile level must lie in (0, 1]");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t n = v.size();
  // ceil(q n) with a guard against q n landing a rounding error above an integer.
  const double qn = q * static_cast<double>(n);
  auto rank = static_cast<std::size_t>(std::ceil(qn - 1e-9 * qn));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
  return v[rank - 1];
}

Quantiles summarize(std::span<const double> values) {
  if (values.empty()) throw EmptyInputError("summary of no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto at = [&](double q) {
    const double qn = q * static_cast<double>(v.size());
    auto rank = static_cast<std::size_t>(std::ceil(qn - 1e-9 * qn));
    return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
  };
  return {v.front(), at(0.01), at(0.25), at(0.5), at(0.75), at(0.99), v.back()};
}

void Problem::validate() const {
  if (model == nullptr) throw DomainError("problem has no model");
  geometry.validate();
  spec.validate(model->line_length());
  const ParameterSpace& s = space();
  if (controls) {
    const Box full = s.controllable_box();
    if (controls->dim() != full.dim() || controls->upper.size() != full.dim())
      throw DomainError("control box has the wrong dimension");
    for (Eigen::Index j = 0; j < full.dim(); ++j) {
      const auto& p = s[s.controllable_indices()[static_cast<std::size_t>(j)]];
      if (!(controls->lower[j] < controls->upper[j]))
        throw DomainError("control bounds of '" + p.name + "' are empty");
      if (controls->lower[j] < full.lower[j] || controls->upper[j] > full.upper[j])
        throw DomainError("control bounds of '" + p.name + "' exceed the model range [" +
                          format_real(full.lower[j]) + ", " + format_real(full.upper[j]) + "]");
    }
  }
  const auto& idx = s.uncertain_indices();
  if (uncertainty.size() != idx.size())
    throw DomainError("uncertainty model has " + std::to_string(uncertainty.size()) +
                      " distributions, the space has " + std::to_string(idx.size()) +
                      " uncertain parameters");
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& p = s[idx[k]];
    const auto& d = uncertainty[k].spec();
    if (d.parameter != p.name)
      throw DomainError("distribution " + std::to_string(k) + " is for '" + d.parameter +
                        "', expected '" + p.name + "'");
    if (d.lo < p.lower || d.hi > p.upper)
      throw DomainError("truncation interval of '" + p.name + "' exceeds its bounds");
  }
}

McSamples mc_samples(const Problem& problem, const Vec& c, int n, const RandomStream& stream,
                     int workers) {
  if (n < 1) throw DomainError("Monte-Carlo sample count must be >= 1");
  const RomModel& model = *problem.model;
  check_controls(model.space(), c);
  McSamples out{std::vector<double>(static_cast<std::size_t>(n)),
                std::vector<double>(static_cast<std::size_t>(n))};
  parallel_for(out.cost.size(), workers, [&](std::size_t i) {
    RandomStream s = stream.derive("mc", i);
    const Vec u = sample_uncertain(problem.uncertainty, s);
    out.cost[i] = cost(model, problem.geometry, problem.spec, c, u);
    out.distance[i] = gauged_distance(model, problem.geometry, assemble_full(model.space(), c, u),
                                      model.line_length());
  });
  return out;
}

CandidateEvaluation mc_evaluate(const Problem& problem, const Vec& c, int n,
                                const RandomStream& stream, int workers, double q) {
  const McSamples s = mc_samples(problem, c, n, stream, workers);
  CandidateEvaluation e;
  e.controls = c;
  e.samples = n;
  e.q = q;
  e.risk = percentile(s.cost, q);
  e.cost = summarize(s.cost);
  double sum = 0.0;  // fixed index order keeps the mean independent of workers
  for (double v : s.cost) sum += v;
  e.mean_cost = sum / n;
  e.distance = summarize(s.distance);
  return e;
}

std::string_view to_string(Method m) { return m == Method::bayes ? "bayes" : "simplex"; }

Method method_from_string(std::string_view text) {
  if (text == "bayes") return Method::bayes;
  if (text == "simplex") return Method::simplex;
  throw ConfigError("unknown method '" + std::string(text) + "'");
}

namespace {

RestartResult run_one(const Problem& problem, Method method, int k, const RandomStream& master,
                      const RestartOptions& options) {
  RestartResult r;
  r.run_id = k;
  r.method = method;
  const RandomStream restart = master.derive("restart", static_cast<std::uint64_t>(k));
  auto noise = std::make_shared<RandomStream>(restart.derive("objective", 0));
  const Objective f = [&problem, noise](const Vec& c) {
    return stochastic_cost(*problem.model, problem.geometry, problem.spec, c, problem.uncertainty,
                           *noise);
  };
  const Box box = problem.control_box();
  try {
    if (method == Method::bayes) {
      const BoResult bo = bayes_optimize(f, box, options.bo, restart.derive("bo", 0));
      r.controls = bo.recommended;
      r.observed_cost = bo.history_values.minCoeff();
      r.evaluations = bo.evaluations;
    } else {
      RandomStream start = restart.derive("start", 0);
      Vec u(box.dim());
      for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = start.uniform();
      const NmResult nm = nelder_mead(f, box, box.from_unit(u), options.nm);
      r.controls = nm.x;
      r.observed_cost = nm.value;
      r.evaluations = nm.evaluations;
    }
    r.ok = true;
  } catch (const Error& e) {
    r.error = std::string(e.kind()) + ": " + e.what();
    r.failure = std::current_exception();
  }
  return r;
}

}  // namespace

std::vector<RestartResult> run_restarts(const Problem& problem, Method method, int n_restarts,
                                        const RandomStream& master,
                                        const RestartOptions& options) {
  if (n_restarts < 1) throw DomainError("restart count must be >= 1");
  problem.validate();
  std::vector<RestartResult> out(static_cast<std::size_t>(n_restarts));
  parallel_for(out.size(), options.workers, [&](std::size_t k) {
    out[k] = run_one(problem, method, static_cast<int>(k), master, options);
  });
  if (std::none_of(out.begin(), out.end(), [](const auto& r) { return r.ok; })) {
    std::rethrow_exception(out.front().failure);
  }
  return out;
}

Selection select_best(const std::vector<RestartResult>& candidates, const Problem& problem,
                      int n_mc, const RandomStream& stream, int workers, double q) {
  Selection sel;
  for (const auto& c : candidates) {
    if (!c.ok) continue;
    CandidateEvaluation e = mc_evaluate(problem, c.controls, n_mc, stream, workers, q);
    e.run_id = c.run_id;
    sel.evaluations.push_back(std::move(e));
  }
  if (sel.evaluations.empty()) throw EmptyInputError("no successful candidate to select from");
  for (std::size_t i = 1; i < sel.evaluations.size(); ++i) {
    const auto& a = sel.evaluations[i];
    const auto& b = sel.evaluations[sel.best];
    if (a.risk < b.risk || (a.risk == b.risk && a.run_id < b.run_id)) sel.best = i;
  }
  return sel;
}

const RestartResult& simplex_representative(const std::vector<RestartResult>& candidates) {
  const RestartResult* best = nullptr;
  for (const auto& c : candidates) {
    if (!c.ok || c.method != Method::simplex) continue;
    if (best == nullptr || c.observed_cost < best->observed_cost ||
        (c.observed_cost == best->observed_cost && c.run_id < best->run_id))
      best = &c;
  }
  if (best == nullptr) throw EmptyInputError("no successful simplex restart");
  return *best;
}

std::vector<double> default_trajectory_positions() {
  std::vector<double> p;
  for (int i = 0; i <= 105; ++i) p.push_back(i);
  for (double s : {95.85, 100.85, 105.85}) p.push_back(s);
  std::sort(p.begin(), p.end());
  return p;
}

PercentileBands trajectory_bands(const Problem& problem, const Vec& c, int n,
                                 std::span<const double> positions, const RandomStream& stream,
                                 int workers) {
  if (n < 1) throw DomainError("trajectory count must be >= 1");
  if (positions.empty()) throw EmptyInputError("no trajectory positions");
  const RomModel& model = *problem.model;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (!(positions[j] >= 0.0 && positions[j] <= model.line_length()))
      throw DomainError("trajectory position outside the line");
    if (j > 0 && !(positions[j] > positions[j - 1]))
      throw DomainError("trajectory positions must be strictly ascending");
  }
  check_controls(model.space(), c);
  const auto np = positions.size();
  // Row-major by trajectory: row i is written only by the worker owning i.
  std::vector<double> d(static_cast<std::size_t>(n) * np);
  parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t i) {
    RandomStream s = stream.derive("mc", i);
    const Vec p = assemble_full(model.space(), c, sample_uncertain(problem.uncertainty, s));
    for (std::size_t j = 0; j < np; ++j)
      d[i * np + j] = gauged_distance(model, problem.geometry, p, positions[j]);
  });
  PercentileBands out{std::vector<double>(positions.begin(), positions.end()), {}};
  std::vector<double> column(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 0; i < column.size(); ++i) column[i] = d[i * np + j];
    out.bands.push_back(summarize(column));
  }
  return out;
}

std::string format_real(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

void put_quantiles(std::ostream& out, const Quantiles& q) {
  for (double v : {q.min, q.p1, q.p25, q.p50, q.p75, q.p99, q.max}) out << ',' << format_real(v);
}

// Commas and quotes in free text would break the column layout.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch == '\n' ? ' ' : ch;
  }
  return q + '"';
}

}  // namespace

void write_boxplot_csv(std::ostream& out, const std::vector<CandidateEvaluation>& evaluations) {
  out << "run_id,min,p1,p25,p50,p75,p99,max,mean\n";
  for (const auto& e : evaluations) {
    out << e.run_id;
    put_quantiles(out, e.cost);
    out << ',' << format_real(e.mean_cost) << '\n';
  }
}

void write_bands_csv(std::ostream& out, const PercentileBands& bands) {
  out << "position_m,min,p1,p25,p50,p75,p99,max\n";
  for (std::size_t j = 0; j < bands.positions.size(); ++j) {
    out << format_real(bands.positions[j]);
    put_quantiles(out, bands.bands[j]);
    out << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "method,P99,median\n";
  for (const auto& r : rows)
    out << r.method << ',' << format_real(r.p99) << ',' << format_real(r.median) << '\n';
}

void write_candidates_csv(std::ostream& out, const ParameterSpace& space,
                          const std::vector<RestartResult>& restarts) {
  out << "run_id,method,ok,observed_cost,evaluations";
  for (std::size_t i : space.controllable_indices()) out << ',' << space[i].name;
  out << ",error\n";
  const auto nc = space.controllable_indices().size();
  for (const auto& r : restarts) {
    out << r.run_id << ',' << to_string(r.method) << ',' << (r.ok ? 1 : 0) << ','
        << (r.ok ? format_real(r.observed_cost) : "") << ',' << r.evaluations;
    for (std::size_t k = 0; k < nc; ++k)
      out << ',' << (r.ok ? format_real(r.controls[static_cast<Eigen::Index>(k)]) : "");
    out << ',' << csv_field(r.error) << '\n';
  }
}

void write_samples_csv(std::ostream& out, const McSamples& samples) {
  out << "sample,cost,end_distance_mm\n";
  for (std::size_t i = 0; i < samples.cost.size(); ++i)
    out << i << ',' << format_real(samples.cost[i]) << ',' << format_real(samples.distance[i])
        << '\n';
}

}  // namespace rpo
