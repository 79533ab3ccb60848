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

// Levenberg-Marquardt fit of the sigmoidal utility parameters (a, b) to
// sampled (power, success probability) pairs.
//
// The fit runs in log-parameter space (log a, log b) so both parameters stay
// strictly positive. Damping follows the classic Marquardt schedule: the
// normal equations are augmented with lambda * diag(J^T J); lambda is divided
// by `lambda_down` after an accepted step and multiplied by `lambda_up` after
// a rejected one.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <span>
#include <istream>
#include <string>
#include <vector>

#include "qosalloc/errors.hpp"
#include "qosalloc/utility.hpp"

namespace qosalloc {

struct FitSample {
  double p;  // watts
  double u;  // observed success probability
};

struct FitConfig {
  // a0 defaults to 1, b0 to the sample power whose utility is nearest 0.5.
  std::optional<double> initial_a;
  std::optional<double> initial_b;
  double lambda0 = 1e-3;
  double lambda_up = 10.0;
  double lambda_down = 10.0;
  int max_iterations = 1000;
  // Convergence when the infinity norm of the log-parameter gradient of
  // 0.5 * SSR drops to this value.
  double gradient_tolerance = 1e-10;
};

struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double ssr = 0.0;  // sum of squared residuals at (a, b)
  int iterations = 0;
  bool converged = false;
  std::vector<double> ssr_history;  // SSR after each accepted step, starting point first
};

/// Partial derivatives of U(p) with respect to a and b, including the (a, b)
/// dependence of the normalizers c and d.
struct UtilityGradient {
  double d_a;
  double d_b;
};

inline UtilityGradient utility_gradient(const SigmoidalUtility& u, double p) {
  // U = s(x) * g, x = a (p - b), g = 1 - e^{-a p}
  const double a = u.a();
  const double x = a * (p - u.b());
  const double s = logistic(x);
  const double s_prime = s * logistic(-x);
  const double g = -std::expm1(-a * p);
  const double g_a = p * std::exp(-a * p);
  return {s_prime * (p - u.b()) * g + s * g_a, -a * s_prime * g};
}

namespace detail {

inline double sum_squared_residuals(std::span<const FitSample> samples, double a, double b) {
  const SigmoidalUtility u(a, b);
  double ssr = 0.0;
  for (const auto& s : samples) {
    const double r = evaluate(u, s.p) - s.u;
    ssr += r * r;
  }
  return ssr;
}

inline std::vector<FitSample> sanitize_samples(std::span<const FitSample> samples) {
  if (samples.size() < 3) {
    throw PreconditionError("fit_sigmoid: need at least 3 samples, got " +
                            std::to_string(samples.size()));
  }
  std::vector<FitSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (!std::isfinite(s.p) || !std::isfinite(s.u)) {
      throw DomainError("fit_sigmoid: non-finite sample");
    }
    if (s.p < 0.0) {
      throw DomainError("fit_sigmoid: negative sample power " + std::to_string(s.p));
    }
    out.push_back({s.p, std::clamp(s.u, 0.0, 1.0)});
  }
  return out;
}

// J^T J and J^T r of the residuals, Jacobian taken in (log a, log b).
struct NormalEquations {
  double h00 = 0.0, h01 = 0.0, h11 = 0.0;
  double g0 = 0.0, g1 = 0.0;

  double gradient_norm() const noexcept { return std::max(std::abs(g0), std::abs(g1)); }
};

inline NormalEquations normal_equations(std::span<const FitSample> samples,
                                        const SigmoidalUtility& u) {
  NormalEquations ne;
  for (const auto& s : samples) {
    const double r = evaluate(u, s.p) - s.u;
    const auto grad = utility_gradient(u, s.p);
    const double j0 = grad.d_a * u.a();
    const double j1 = grad.d_b * u.b();
    ne.h00 += j0 * j0;
    ne.h01 += j0 * j1;
    ne.h11 += j1 * j1;
    ne.g0 += j0 * r;
    ne.g1 += j1 * r;
  }
  return ne;
}

}  // namespace detail

inline FitResult fit_sigmoid(std::span<const FitSample> raw, const FitConfig& cfg = {}) {
  if (!(cfg.lambda0 > 0.0) || !(cfg.lambda_up > 1.0) || !(cfg.lambda_down > 1.0) ||
      cfg.max_iterations < 1 || !(cfg.gradient_tolerance > 0.0)) {
    throw PreconditionError("fit_sigmoid: invalid FitConfig");
  }
  const auto samples = detail::sanitize_samples(raw);

  double b0 = cfg.initial_b.value_or(0.0);
  if (!cfg.initial_b) {
    const auto nearest = std::min_element(
        samples.begin(), samples.end(),
        [](const FitSample& l, const FitSample& r) { return std::abs(l.u - 0.5) < std::abs(r.u - 0.5); });
    b0 = nearest->p;
    if (!(b0 > 0.0)) {
      double smallest = 1.0;
      for (const auto& s : samples) {
        if (s.p > 0.0) smallest = std::min(smallest, s.p);
      }
      b0 = smallest;
    }
  }
  const double a0 = cfg.initial_a.value_or(1.0);
  if (!(a0 > 0.0) || !(b0 > 0.0)) {
    throw DomainError("fit_sigmoid: initial parameters must be > 0");
  }

  FitResult result;
  result.a = a0;
  result.b = b0;
  result.ssr = detail::sum_squared_residuals(samples, a0, b0);
  result.ssr_history.push_back(result.ssr);

  const bool degenerate = std::all_of(samples.begin(), samples.end(), [&](const FitSample& s) {
    return s.u == samples.front().u;
  });
  if (degenerate) {
    return result;
  }

  double log_a = std::log(a0);
  double log_b = std::log(b0);
  double lambda = cfg.lambda0;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    result.iterations = it;
    const SigmoidalUtility u(std::exp(log_a), std::exp(log_b));

    const auto ne = detail::normal_equations(samples, u);
    if (ne.gradient_norm() <= cfg.gradient_tolerance) {
      result.converged = true;
      break;
    }
    const auto [h00, h01, h11, g0, g1] = ne;

    bool accepted = false;
    bool stalled = false;
    while (!accepted) {
      const double d0 = std::max(h00, 1e-300);
      const double d1 = std::max(h11, 1e-300);
      const double m00 = h00 + lambda * d0;
      const double m11 = h11 + lambda * d1;
      const double det = m00 * m11 - h01 * h01;
      if (!(det > 0.0) || !std::isfinite(det)) {
        lambda *= cfg.lambda_up;
        if (lambda > 1e30) break;
        continue;
      }
      const double step0 = (-g0 * m11 + g1 * h01) / det;
      const double step1 = (-g1 * m00 + g0 * h01) / det;
      const double trial_a = std::exp(log_a + step0);
      const double trial_b = std::exp(log_b + step1);
      if (!(trial_a > 0.0) || !(trial_b > 0.0) || !std::isfinite(trial_a) || !std::isfinite(trial_b)) {
        lambda *= cfg.lambda_up;
        if (lambda > 1e30) break;
        continue;
      }
      const double trial_ssr = detail::sum_squared_residuals(samples, trial_a, trial_b);
      if (trial_ssr <= result.ssr) {
        accepted = true;
        stalled = std::abs(step0) <= 1e-15 && std::abs(step1) <= 1e-15;
        log_a += step0;
        log_b += step1;
        result.a = trial_a;
        result.b = trial_b;
        result.ssr = trial_ssr;
        result.ssr_history.push_back(trial_ssr);
        lambda = std::max(lambda / cfg.lambda_down, 1e-300);
      } else {
        lambda *= cfg.lambda_up;
        if (lambda > 1e30) break;
      }
    }
    if (!accepted || stalled) {
      break;
    }
  }

  if (!result.converged) {
    // The loop can stop right after an accepted step that already meets the tolerance.
    const SigmoidalUtility u(result.a, result.b);
    result.converged =
        detail::normal_equations(samples, u).gradient_norm() <= cfg.gradient_tolerance;
  }
  return result;
}

/// Noiseless samples of `u` on an evenly spaced grid over [p_lo, p_hi].
inline std::vector<FitSample> sample_utility(const SigmoidalUtility& u, double p_lo, double p_hi,
                                             int count) {
  if (count < 2 || !(p_hi > p_lo) || p_lo < 0.0) {
    throw PreconditionError("sample_utility: need count >= 2 and 0 <= p_lo < p_hi");
  }
  std::vector<FitSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double p = p_lo + (p_hi - p_lo) * k / (count - 1);
    out.push_back({p, evaluate(u, p)});
  }
  return out;
}

/// Parse a `power_w,utility` CSV (header required, one sample per row).
inline std::vector<FitSample> read_fit_samples(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line) != "power_w,utility") {
    throw PreconditionError("line " + std::to_string(line_no) +
                            ": expected header 'power_w,utility'");
  }
  std::vector<FitSample> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw PreconditionError("line " + std::to_string(line_no) + ": expected two columns");
    }
    try {
      std::size_t used_p = 0, used_u = 0;
      const std::string ps = trim(line.substr(0, comma));
      const std::string us = trim(line.substr(comma + 1));
      const double p = std::stod(ps, &used_p);
      const double u = std::stod(us, &used_u);
      if (used_p != ps.size() || used_u != us.size()) throw std::invalid_argument("trailing");
      out.push_back({p, u});
    } catch (const std::logic_error&) {
      throw PreconditionError("line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

inline std::vector<FitSample> read_fit_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw PreconditionError("cannot open sample file '" + path + "'");
  }
  return read_fit_samples(in);
}

}  // namespace qosalloc
