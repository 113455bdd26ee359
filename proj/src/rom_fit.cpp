// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/rom_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>

#include "rpo/errors.hpp"

namespace rpo {

TrainingDataset::Slice TrainingDataset::slice(std::string_view output) const {
  const auto it = std::find(output_names.begin(), output_names.end(), output);
  if (it == output_names.end())
    throw EmptyDatasetError("dataset has no rows for output '" + std::string(output) + "'");
  const int id = static_cast<int>(it - output_names.begin());
  std::vector<Eigen::Index> rows;
  for (Eigen::Index r = 0; r < inputs.rows(); ++r)
    if (output_of_row[static_cast<std::size_t>(r)] == id) rows.push_back(r);
  if (rows.empty())
    throw EmptyDatasetError("dataset has no rows for output '" + std::string(output) + "'");
  Slice s{Mat(static_cast<Eigen::Index>(rows.size()), inputs.cols()),
          Vec(static_cast<Eigen::Index>(rows.size()))};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.x.row(static_cast<Eigen::Index>(i)) = inputs.row(rows[i]);
    s.y[static_cast<Eigen::Index>(i)] = values[rows[i]];
  }
  return s;
}

namespace {

// Solves the symmetric positive semi-definite system `a z = b`. Falls back to a
// ridge of 1e-10 x mean diagonal when the pivots show rank deficiency.
Vec solve_normal(const Mat& a, const Vec& b) {
  const double mean_diag = a.diagonal().mean();
  if (!(mean_diag > 0.0) || !std::isfinite(mean_diag))
    throw SingularSolveError("normal equations are identically zero");
  Eigen::LDLT<Mat> ldlt(a);
  bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
  if (ok) {
    const Vec d = ldlt.vectorD();
    ok = d.minCoeff() > 1e-13 * d.cwiseAbs().maxCoeff();
  }
  if (ok) return ldlt.solve(b);
  Mat ridged = a;
  ridged.diagonal().array() += 1e-10 * mean_diag;
  Eigen::LDLT<Mat> ridge(ridged);
  if (ridge.info() != Eigen::Success) throw SingularSolveError("ridge-regularised solve failed");
  Vec z = ridge.solve(b);
  if (!z.allFinite()) throw SingularSolveError("ridge-regularised solve produced non-finite values");
  return z;
}

// Piecewise-linear basis location of each sample on one grid.
struct Locator {
  std::vector<int> segment;
  Vec t;
};

Locator locate(const std::vector<double>& grid, const Eigen::Ref<const Vec>& x) {
  Locator loc{std::vector<int>(static_cast<std::size_t>(x.size())), Vec(x.size())};
  for (Eigen::Index r = 0; r < x.size(); ++r) {
    const double v = x[r];
    if (!(v >= grid.front() && v <= grid.back())) throw_extrapolation(v, grid.front(), grid.back());
    auto hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), v) - grid.begin());
    if (hi == grid.size()) hi = grid.size() - 1;
    const std::size_t lo = hi - 1;
    loc.segment[static_cast<std::size_t>(r)] = static_cast<int>(lo);
    loc.t[r] = (v - grid[lo]) / (grid[hi] - grid[lo]);
  }
  return loc;
}

class AlsSolver {
 public:
  AlsSolver(const Mat& x, const Vec& y, const std::vector<std::vector<double>>& grids,
            std::size_t terms)
      : y_(y), grids_(grids), n_inputs_(grids.size()), m_(static_cast<Eigen::Index>(terms)) {
    for (std::size_t k = 0; k < n_inputs_; ++k)
      loc_.push_back(locate(grids_[k], x.col(static_cast<Eigen::Index>(k))));
    values_.resize(n_inputs_);
    evals_.resize(n_inputs_);
    initialise(x);
  }

  double loss() const { return loss_; }

  // One cyclic pass over all inputs; returns the new loss.
  double sweep() {
    for (std::size_t k = 0; k < n_inputs_; ++k) update_block(k);
    return loss_;
  }

  // Extrapolate from the factor values saved in `previous` by `step`.
  bool extrapolate(const std::vector<Mat>& previous, double step) {
    std::vector<Mat> current = absorbed();
    std::vector<Mat> trial(n_inputs_);
    for (std::size_t k = 0; k < n_inputs_; ++k) trial[k] = previous[k] + step * (current[k] - previous[k]);
    return try_absorbed(trial);
  }

  // Levenberg-Marquardt refinement of all factor values jointly.
  std::size_t refine(std::size_t iterations, double tol, std::vector<double>& history) {
    std::vector<Eigen::Index> offset(n_inputs_ + 1, 0);
    for (std::size_t k = 0; k < n_inputs_; ++k)
      offset[k + 1] = offset[k] + static_cast<Eigen::Index>(grids_[k].size()) * m_;
    const Eigen::Index p = offset.back();
    const Eigen::Index n = y_.size();
    double mu = 1e-3;
    std::size_t accepted = 0;
    // Below this the residual is round-off.
    const double floor_loss = 1e-28 * y_.squaredNorm() / static_cast<double>(n);
    for (std::size_t it = 0; it < iterations; ++it) {
      if (loss_ <= floor_loss) break;
      std::vector<Mat> theta = absorbed();
      const Vec resid = predict() - y_;

      Mat jtj = Mat::Zero(p, p);
      Vec grad = Vec::Zero(p);
      Mat prefix(n_inputs_ + 1, m_), suffix(n_inputs_ + 1, m_);
      std::vector<Vec> v(n_inputs_, Vec(2 * m_));
      std::vector<Eigen::Index> at(n_inputs_);
      for (Eigen::Index r = 0; r < n; ++r) {
        prefix.row(0).setOnes();
        suffix.row(static_cast<Eigen::Index>(n_inputs_)).setOnes();
        for (std::size_t k = 0; k < n_inputs_; ++k)
          prefix.row(static_cast<Eigen::Index>(k + 1)) =
              prefix.row(static_cast<Eigen::Index>(k)).cwiseProduct(evals_[k].row(r));
        for (std::size_t k = n_inputs_; k-- > 0;)
          suffix.row(static_cast<Eigen::Index>(k)) =
              suffix.row(static_cast<Eigen::Index>(k + 1)).cwiseProduct(evals_[k].row(r));
        for (std::size_t k = 0; k < n_inputs_; ++k) {
          const double t = loc_[k].t[r];
          const auto others = prefix.row(static_cast<Eigen::Index>(k))
                                  .cwiseProduct(suffix.row(static_cast<Eigen::Index>(k + 1)))
                                  .transpose();
          v[k].head(m_) = (1.0 - t) * others;
          v[k].tail(m_) = t * others;
          at[k] = offset[k] + loc_[k].segment[static_cast<std::size_t>(r)] * m_;
          grad.segment(at[k], 2 * m_) += resid[r] * v[k];
        }
        for (std::size_t k = 0; k < n_inputs_; ++k)
          for (std::size_t l = k; l < n_inputs_; ++l)
            jtj.block(at[k], at[l], 2 * m_, 2 * m_).noalias() += v[k] * v[l].transpose();
      }
      jtj.triangularView<Eigen::StrictlyLower>() = jtj.transpose();
      Vec damping = jtj.diagonal();
      const double floor = 1e-12 * std::max(damping.maxCoeff(), 1e-300);
      damping = damping.cwiseMax(floor);

      bool stepped = false;
      for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
        Mat lhs = jtj;
        lhs.diagonal() += mu * damping;
        Eigen::LLT<Mat> llt(lhs);
        if (llt.info() == Eigen::Success) {
          const Vec delta = -llt.solve(grad);
          std::vector<Mat> trial(n_inputs_);
          for (std::size_t k = 0; k < n_inputs_; ++k) {
            const Eigen::Index g = static_cast<Eigen::Index>(grids_[k].size());
            Mat d = Eigen::Map<const Mat>(delta.data() + offset[k], m_, g).transpose();
            trial[k] = theta[k] + d;
          }
          const double before = loss_;
          if (try_absorbed(trial)) {
            stepped = true;
            mu = std::max(mu / 3.0, 1e-15);
            ++accepted;
            history.push_back(loss_);
            if (before - loss_ <= tol * before) return accepted;
            break;
          }
        }
        mu *= 4.0;
      }
      if (!stepped) break;
    }
    return accepted;
  }

  std::vector<Mat> absorbed() const {
    std::vector<Mat> out(values_);
    out[0] = out[0] * weights_.asDiagonal();
    return out;
  }

  Expansion terms(std::span<const std::string> names) const {
    Expansion out(static_cast<std::size_t>(m_));
    for (Eigen::Index m = 0; m < m_; ++m) {
      Term& t = out[static_cast<std::size_t>(m)];
      t.weight = weights_[m];
      for (std::size_t k = 0; k < n_inputs_; ++k) {
        Factor f{names[k], grids_[k], std::vector<double>(grids_[k].size())};
        for (std::size_t j = 0; j < f.values.size(); ++j)
          f.values[j] = values_[k](static_cast<Eigen::Index>(j), m);
        t.factors.push_back(std::move(f));
      }
    }
    return out;
  }

 private:
  void initialise(const Mat& x) {
    const Eigen::Index n = y_.size();
    const auto nk = static_cast<Eigen::Index>(n_inputs_);
    // Screening: rank inputs by the magnitude of their linear-regression
    // coefficient on grid-normalised coordinates.
    Mat design(n, nk + 1);
    design.col(0).setOnes();
    for (std::size_t k = 0; k < n_inputs_; ++k) {
      const double lo = grids_[k].front(), hi = grids_[k].back();
      design.col(static_cast<Eigen::Index>(k) + 1) =
          (x.col(static_cast<Eigen::Index>(k)).array() - lo) / (hi - lo);
    }
    const Vec beta = solve_normal(design.transpose() * design, design.transpose() * y_);
    std::vector<std::size_t> order(n_inputs_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(beta[static_cast<Eigen::Index>(a) + 1]) >
             std::abs(beta[static_cast<Eigen::Index>(b) + 1]);
    });

    for (std::size_t k = 0; k < n_inputs_; ++k)
      values_[k] = Mat::Ones(static_cast<Eigen::Index>(grids_[k].size()), m_);
    const auto ramp = [&](std::size_t k, Eigen::Index m) {
      const auto& g = grids_[k];
      for (std::size_t j = 0; j < g.size(); ++j)
        values_[k](static_cast<Eigen::Index>(j), m) = (g[j] - g.front()) / (g.back() - g.front());
    };
    for (Eigen::Index m = 0; m < m_; ++m) {
      const auto mm = static_cast<std::size_t>(m);
      ramp(order[mm % n_inputs_], m);
      // Beyond one term per input, pair ramps so no two terms start identical.
      if (mm >= n_inputs_) ramp(order[(mm + mm / n_inputs_) % n_inputs_], m);
    }
    weights_ = Vec::Ones(m_);
    normalise();
    for (std::size_t k = 0; k < n_inputs_; ++k) evals_[k] = evaluate_factor(k, values_[k]);

    // Weights alone by one least-squares solve.
    Mat phi = Mat::Ones(n, m_);
    for (std::size_t k = 0; k < n_inputs_; ++k) phi = phi.cwiseProduct(evals_[k]);
    weights_ = solve_normal(phi.transpose() * phi, phi.transpose() * y_);
    loss_ = (predict() - y_).squaredNorm() / static_cast<double>(n);
  }

  // Moves each factor's RMS into the term weight.
  void normalise() {
    for (std::size_t k = 0; k < n_inputs_; ++k) {
      for (Eigen::Index m = 0; m < m_; ++m) {
        const double rms = std::sqrt(values_[k].col(m).squaredNorm() /
                                     static_cast<double>(values_[k].rows()));
        if (rms > 0.0 && std::isfinite(rms)) {
          values_[k].col(m) /= rms;
          weights_[m] *= rms;
        } else {
          values_[k].col(m).setOnes();
          weights_[m] = 0.0;
        }
      }
    }
  }

  Mat evaluate_factor(std::size_t k, const Mat& v) const {
    const Eigen::Index n = y_.size();
    Mat f(n, m_);
    const auto& loc = loc_[k];
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::Index i = loc.segment[static_cast<std::size_t>(r)];
      const double t = loc.t[r];
      f.row(r) = (1.0 - t) * v.row(i) + t * v.row(i + 1);
    }
    return f;
  }

  Vec predict() const {
    Mat prod = evals_[0];
    for (std::size_t k = 1; k < n_inputs_; ++k) prod = prod.cwiseProduct(evals_[k]);
    return prod * weights_;
  }

  void update_block(std::size_t k) {
    const Eigen::Index n = y_.size();
    const auto g = static_cast<Eigen::Index>(grids_[k].size());
    Mat others = Mat::Ones(n, m_);
    for (std::size_t l = 0; l < n_inputs_; ++l)
      if (l != k) others = others.cwiseProduct(evals_[l]);

    // Unknowns are ordered node-major (node j, term m) -> j * M + m, so the
    // 2M non-zeros of a sample are contiguous.
    const Eigen::Index size = g * m_;
    Mat ata = Mat::Zero(size, size);
    Vec aty = Vec::Zero(size);
    Vec v(2 * m_);
    const auto& loc = loc_[k];
    for (Eigen::Index r = 0; r < n; ++r) {
      const double t = loc.t[r];
      v.head(m_) = (1.0 - t) * others.row(r).transpose();
      v.tail(m_) = t * others.row(r).transpose();
      const Eigen::Index at = loc.segment[static_cast<std::size_t>(r)] * m_;
      ata.block(at, at, 2 * m_, 2 * m_).noalias() += v * v.transpose();
      aty.segment(at, 2 * m_) += y_[r] * v;
    }
    const Vec z = solve_normal(ata, aty);

    const Mat saved_values = values_[k];
    const Vec saved_weights = weights_;
    const Mat saved_evals = evals_[k];
    const double saved_loss = loss_;

    Mat u = Eigen::Map<const Mat>(z.data(), m_, g).transpose();
    for (Eigen::Index m = 0; m < m_; ++m) {
      const double rms = std::sqrt(u.col(m).squaredNorm() / static_cast<double>(g));
      if (rms > 0.0 && std::isfinite(rms)) {
        values_[k].col(m) = u.col(m) / rms;
        weights_[m] = rms;
      } else {
        values_[k].col(m).setOnes();
        weights_[m] = 0.0;
      }
    }
    evals_[k] = evaluate_factor(k, values_[k]);
    loss_ = (predict() - y_).squaredNorm() / static_cast<double>(n);
    if (!(loss_ <= saved_loss)) {
      values_[k] = saved_values;
      weights_ = saved_weights;
      evals_[k] = saved_evals;
      loss_ = saved_loss;
    }
  }

  // Adopt factor values with weights absorbed into input 0 if that lowers the loss.
  bool try_absorbed(const std::vector<Mat>& trial) {
    if (std::any_of(trial.begin(), trial.end(), [](const Mat& t) { return !t.allFinite(); }))
      return false;
    std::vector<Mat> saved_values = values_;
    const Vec saved_weights = weights_;
    std::vector<Mat> saved_evals = evals_;
    const double saved_loss = loss_;

    values_ = trial;
    weights_ = Vec::Ones(m_);
    normalise();
    for (std::size_t k = 0; k < n_inputs_; ++k) evals_[k] = evaluate_factor(k, values_[k]);
    loss_ = (predict() - y_).squaredNorm() / static_cast<double>(y_.size());
    if (loss_ < saved_loss) return true;
    values_ = std::move(saved_values);
    weights_ = saved_weights;
    evals_ = std::move(saved_evals);
    loss_ = saved_loss;
    return false;
  }

  const Vec& y_;
  const std::vector<std::vector<double>>& grids_;
  std::size_t n_inputs_;
  Eigen::Index m_;
  std::vector<Locator> loc_;
  std::vector<Mat> values_;  // per input: nodes x terms, unit RMS columns
  std::vector<Mat> evals_;   // per input: samples x terms
  Vec weights_;
  double loss_ = 0.0;
};

void check_grids(const std::vector<std::vector<double>>& grids, std::size_t inputs) {
  if (grids.size() != inputs) throw DomainError("need exactly one grid per input");
  for (std::size_t k = 0; k < grids.size(); ++k) {
    const auto& g = grids[k];
    if (g.size() < 2) throw DomainError("grid " + std::to_string(k) + " needs at least 2 nodes");
    for (std::size_t j = 1; j < g.size(); ++j)
      if (!(g[j] > g[j - 1]))
        throw DomainError("grid " + std::to_string(k) + " is not strictly increasing");
  }
}

}  // namespace

AlsResult fit_als(const Mat& x, const Vec& y, std::span<const std::string> input_names,
                  const std::vector<std::vector<double>>& grids, const AlsOptions& options) {
  if (y.size() == 0) throw EmptyDatasetError("cannot fit an empty dataset");
  if (x.rows() != y.size() || static_cast<std::size_t>(x.cols()) != input_names.size())
    throw DomainError("dataset shape does not match the input names");
  if (options.terms < 1) throw DomainError("term count must be at least 1");
  if (!y.allFinite()) throw DomainError("training targets must be finite");
  check_grids(grids, input_names.size());

  AlsSolver solver(x, y, grids, options.terms);
  AlsResult result;
  result.loss_history.push_back(solver.loss());
  for (std::size_t s = 0; s < options.max_sweeps; ++s) {
    const double before = solver.loss();
    const std::vector<Mat> previous = solver.absorbed();
    solver.sweep();
    if (options.extrapolate && s > 0)
      solver.extrapolate(previous, std::cbrt(static_cast<double>(s + 1)));
    result.loss_history.push_back(solver.loss());
    result.sweeps = s + 1;
    if (solver.loss() == 0.0 || before - solver.loss() <= options.tol * before) break;
  }
  if (options.refine_iterations > 0)
    result.refine_steps = solver.refine(options.refine_iterations, options.tol, result.loss_history);
  result.terms = solver.terms(input_names);
  result.rmse = std::sqrt(solver.loss());
  if (!std::isfinite(result.rmse))
    throw NumericalError("training loss overflowed; rescale the targets");
  return result;
}

AlsResult fit_als(const TrainingDataset& data, std::string_view output,
                  const std::vector<std::vector<double>>& grids, const AlsOptions& options) {
  const auto slice = data.slice(output);
  return fit_als(slice.x, slice.y, data.input_names, grids, options);
}

RomFit fit_rom(const TrainingDataset& data, const ParameterSpace& space, double line_length,
               const GaugedGeometry& geometry, const std::vector<std::vector<double>>& grids,
               const AlsOptions& options, const std::vector<std::string>& outputs) {
  std::vector<std::string> expected{std::string(kPositionInput)};
  for (const auto& s : space.specs()) expected.push_back(s.name);
  if (data.input_names != expected)
    throw DomainError("dataset columns do not match the parameter space");
  check_grids(grids, expected.size());
  for (std::size_t k = 0; k < grids.size(); ++k) {
    const double lo = k == 0 ? 0.0 : space[k - 1].lower;
    const double hi = k == 0 ? line_length : space[k - 1].upper;
    if (grids[k].front() != lo || grids[k].back() != hi)
      throw DomainError("grid for '" + expected[k] + "' must span exactly its input range");
  }

  const auto& names = outputs.empty() ? data.output_names : outputs;
  std::map<std::string, Expansion, std::less<>> fitted;
  std::map<std::string, double> rmse;
  for (const auto& name : names) {
    AlsResult r = fit_als(data, name, grids, options);
    rmse[name] = r.rmse;
    fitted.emplace(name, std::move(r.terms));
  }
  return {RomModel(line_length, space, geometry, std::move(fitted)), std::move(rmse)};
}

}  // namespace rpo
