/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The qosalloc Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Centralized reference solvers for
//
//   maximize  sum_i log U_i(P_i)   subject to  sum_i P_i <= P_T,  P_i >= 0
//
// used to check the distributed bidding result. Nothing here shares code
// with the allocator's price/bid loop.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qosalloc/errors.hpp"
#include "qosalloc/utility.hpp"

namespace qosalloc {

/// Lower clamp on powers so log U stays finite.
inline constexpr double kOraclePowerFloor = 1e-9;

enum class OracleMethod { ProjectedGradient, GridSearch };

struct OracleSolution {
  std::vector<double> powers;
  double objective = -std::numeric_limits<double>::infinity();
  double multiplier = 0.0;  // median log-utility slope at the solution
  OracleMethod method = OracleMethod::ProjectedGradient;
  bool ok = true;
  int iterations = 0;
  std::string diagnostics;
};

inline double sum_log_utility(std::span<const SigmoidalUtility> utilities,
                              std::span<const double> powers) {
  if (utilities.size() != powers.size()) {
    throw PreconditionError("sum_log_utility: size mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    total += log_utility(utilities[i], std::max(powers[i], 0.0));
  }
  return total;
}

struct KktReport {
  std::vector<double> slopes;            // NaN where the power is not interior
  double median_slope = std::numeric_limits<double>::quiet_NaN();
  double slope_spread = std::numeric_limits<double>::quiet_NaN();  // max |s_i - median|
  double relative_spread = std::numeric_limits<double>::quiet_NaN();
  double budget_slack = 0.0;             // P_T - sum P_i
  std::vector<std::size_t> positivity_violations;  // indices with P_i <= 0

  bool valid() const { return positivity_violations.empty() && budget_slack >= -1e-9; }
};

/// First-order optimality report: how far the log-utility slopes of the
/// interior coordinates are from a common multiplier.
inline KktReport kkt_check(std::span<const SigmoidalUtility> utilities,
                           std::span<const double> allocation, double total_power) {
  if (utilities.size() != allocation.size()) {
    throw PreconditionError("kkt_check: size mismatch");
  }
  KktReport report;
  report.slopes.assign(allocation.size(), std::numeric_limits<double>::quiet_NaN());
  report.budget_slack = total_power - std::accumulate(allocation.begin(), allocation.end(), 0.0);

  std::vector<double> interior;
  for (std::size_t i = 0; i < allocation.size(); ++i) {
    if (!(allocation[i] > 0.0)) {
      report.positivity_violations.push_back(i);
      continue;
    }
    report.slopes[i] = log_utility_slope(utilities[i], allocation[i]);
    if (allocation[i] > kOraclePowerFloor) {
      interior.push_back(report.slopes[i]);
    }
  }
  if (interior.empty()) {
    return report;
  }
  std::vector<double> sorted = interior;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  report.median_slope =
      sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  report.slope_spread = 0.0;
  for (double s : interior) {
    report.slope_spread = std::max(report.slope_spread, std::abs(s - report.median_slope));
  }
  report.relative_spread = report.slope_spread / report.median_slope;
  return report;
}

namespace detail {

// Euclidean projection onto {x_i >= floor, sum x_i <= total}.
inline std::vector<double> project_budget(std::vector<double> x, double total, double floor) {
  for (double& v : x) v = std::max(v, floor);
  if (std::accumulate(x.begin(), x.end(), 0.0) <= total) {
    return x;
  }
  // Projection onto the shifted simplex {y >= 0, sum y = total - n floor}.
  const double radius = total - floor * static_cast<double>(x.size());
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - floor;
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::max(y[i] - theta, 0.0) + floor;
  return x;
}

}  // namespace detail

/**
 * Projected gradient ascent with Armijo backtracking.
 *
 * `steps` bounds the number of outer iterations, `step_size` is the initial
 * trial step (watts per unit slope). Stops early once the relative slope
 * spread is below 1e-10.
 */
inline OracleSolution solve_projected_gradient(std::span<const SigmoidalUtility> utilities,
                                               double total_power, int steps = 200000,
                                               double step_size = 10.0) {
  if (utilities.empty()) {
    throw PreconditionError("solve_projected_gradient: need at least one utility");
  }
  if (!(total_power > 0.0)) {
    throw DomainError("solve_projected_gradient: total power must be > 0");
  }
  if (steps < 1 || !(step_size > 0.0)) {
    throw PreconditionError("solve_projected_gradient: steps >= 1 and step_size > 0 required");
  }
  const std::size_t m = utilities.size();
  if (total_power <= kOraclePowerFloor * static_cast<double>(m)) {
    throw DomainError("solve_projected_gradient: budget below the power floor");
  }

  OracleSolution sol;
  sol.method = OracleMethod::ProjectedGradient;
  sol.powers.assign(m, total_power / static_cast<double>(m));
  double objective = sum_log_utility(utilities, sol.powers);
  double step = step_size;

  auto gradient = [&](const std::vector<double>& x) {
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = log_utility_slope(utilities[i], x[i]);
    return g;
  };

  for (int it = 1; it <= steps; ++it) {
    sol.iterations = it;
    const auto report = kkt_check(utilities, sol.powers, total_power);
    if (report.relative_spread <= 1e-10 && std::abs(report.budget_slack) <= 1e-9) {
      break;
    }
    const auto g = gradient(sol.powers);
    bool improved = false;
    while (step > 1e-18) {
      std::vector<double> trial(m);
      for (std::size_t i = 0; i < m; ++i) trial[i] = sol.powers[i] + step * g[i];
      trial = detail::project_budget(std::move(trial), total_power, kOraclePowerFloor);
      const double trial_objective = sum_log_utility(utilities, trial);
      if (!std::isfinite(trial_objective)) {
        step *= 0.5;
        continue;
      }
      double directional = 0.0;
      for (std::size_t i = 0; i < m; ++i) directional += g[i] * (trial[i] - sol.powers[i]);
      if (trial_objective >= objective + 1e-4 * directional) {
        improved = trial_objective > objective;
        sol.powers = std::move(trial);
        objective = trial_objective;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      break;
    }
  }

  sol.objective = objective;
  const auto report = kkt_check(utilities, sol.powers, total_power);
  sol.multiplier = report.median_slope;
  if (!std::isfinite(objective)) {
    sol.ok = false;
    sol.diagnostics = "objective diverged";
  } else if (!(report.relative_spread <= 1e-4)) {
    sol.ok = false;
    sol.diagnostics = "stopped with relative slope spread " + std::to_string(report.relative_spread) +
                      " after " + std::to_string(sol.iterations) + " iterations (step " +
                      std::to_string(step) + ")";
  }
  return sol;
}

/// Exhaustive search over the lattice {P : sum P = P_T, P_i = k_i h, k_i >= 1}
/// with h = P_T / round(P_T / resolution). At most three UEs.
inline OracleSolution solve_grid_search(std::span<const SigmoidalUtility> utilities,
                                        double total_power, double resolution) {
  const std::size_t m = utilities.size();
  if (m == 0) {
    throw PreconditionError("solve_grid_search: need at least one utility");
  }
  if (m > 3) {
    throw PreconditionError("solve_grid_search: refusing " + std::to_string(m) +
                            " UEs, cost grows as grid^(M-1); at most 3 supported");
  }
  if (!(total_power > 0.0) || !(resolution > 0.0)) {
    throw DomainError("solve_grid_search: total power and resolution must be > 0");
  }

  OracleSolution sol;
  sol.method = OracleMethod::GridSearch;
  if (m == 1) {
    sol.powers = {total_power};
    sol.objective = sum_log_utility(utilities, sol.powers);
    sol.multiplier = log_utility_slope(utilities[0], total_power);
    return sol;
  }

  const long cells = std::max(static_cast<long>(m), std::lround(total_power / resolution));
  const double h = total_power / static_cast<double>(cells);
  std::vector<std::vector<double>> table(m, std::vector<double>(static_cast<std::size_t>(cells)));
  for (std::size_t i = 0; i < m; ++i) {
    for (long k = 1; k < cells; ++k) {
      table[i][static_cast<std::size_t>(k)] = log_utility(utilities[i], h * static_cast<double>(k));
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  std::vector<long> best_k(m, 1);
  if (m == 2) {
    for (long k0 = 1; k0 < cells; ++k0) {
      const double v = table[0][k0] + table[1][cells - k0];
      if (v > best) {
        best = v;
        best_k = {k0, cells - k0};
      }
    }
  } else {
    for (long k0 = 1; k0 < cells - 1; ++k0) {
      for (long k1 = 1; k0 + k1 < cells; ++k1) {
        const long k2 = cells - k0 - k1;
        const double v = table[0][k0] + table[1][k1] + table[2][k2];
        if (v > best) {
          best = v;
          best_k = {k0, k1, k2};
        }
      }
    }
  }
  sol.iterations = static_cast<int>(cells);
  sol.powers.resize(m);
  for (std::size_t i = 0; i < m; ++i) sol.powers[i] = h * static_cast<double>(best_k[i]);
  sol.objective = sum_log_utility(utilities, sol.powers);
  sol.multiplier = kkt_check(utilities, sol.powers, total_power).median_slope;
  return sol;
}

}  // namespace qosalloc
