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

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qosalloc/errors.hpp"

namespace qosalloc {

/// Default minimum QoS: 95% probability of successful packet reception.
inline constexpr double kDefaultQosTarget = 0.95;

/// Logistic function evaluated without overflow for any finite argument.
inline double logistic(double x) noexcept {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(logistic(x)), finite for large negative x.
inline double log_logistic(double x) noexcept {
  if (x >= 0.0) {
    return -std::log1p(std::exp(-x));
  }
  return x - std::log1p(std::exp(x));
}

/**
 * Normalized sigmoidal utility of allocated power.
 *
 *   U(P) = c * (1 / (1 + e^{-a (P - b)}) - d)
 *   c = (1 + e^{ab}) / e^{ab},  d = 1 / (1 + e^{ab})
 *
 * so that U(0) = 0 and U(P) -> 1 as P -> infinity. Only the steepness a and
 * the inflection power b are stored; c and d are derived on demand.
 *
 * Internally the curve is evaluated through the equivalent product
 * U(P) = logistic(a (P - b)) * (1 - e^{-a P}), which follows from
 * c = 1 / logistic(ab). It keeps U(0) exactly zero and avoids the
 * cancellation in (sigma - d) for small P.
 */
class SigmoidalUtility {
public:
  SigmoidalUtility(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw DomainError("sigmoid steepness a must be finite and > 0, got " + std::to_string(a));
    }
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw DomainError("sigmoid inflection b must be finite and > 0, got " + std::to_string(b));
    }
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  /// Normalizer c = (1 + e^{ab}) / e^{ab} = 1 + e^{-ab}.
  double c() const noexcept { return 1.0 + std::exp(-a_ * b_); }
  /// Offset d = 1 / (1 + e^{ab}).
  double d() const noexcept { return logistic(-a_ * b_); }

  /// The raw (un-normalized) logistic term at power p.
  double sigma(double p) const noexcept { return logistic(a_ * (p - b_)); }

  friend bool operator==(const SigmoidalUtility&, const SigmoidalUtility&) = default;

private:
  double a_;
  double b_;
};

inline void require_nonnegative_power(double p, const char* op) {
  if (!(p >= 0.0)) {
    throw DomainError(std::string(op) + ": power must be >= 0, got " + std::to_string(p));
  }
}

/// Success probability U(p) in [0, 1). Throws DomainError for p < 0.
inline double evaluate(const SigmoidalUtility& u, double p) {
  require_nonnegative_power(p, "evaluate");
  // U < 1 for every finite p, but the product rounds up to 1.0 once both
  // factors saturate; keep the result inside [0, 1).
  constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  if (std::isinf(p)) {
    return kBelowOne;
  }
  return std::min(u.sigma(p) * -std::expm1(-u.a() * p), kBelowOne);
}

/// log U(p); -infinity at p = 0.
inline double log_utility(const SigmoidalUtility& u, double p) {
  require_nonnegative_power(p, "log_utility");
  if (p == 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return log_logistic(u.a() * (p - u.b())) + std::log(-std::expm1(-u.a() * p));
}

/**
 * d/dP log U(P) = a sigma (1 - sigma) / (sigma - d).
 *
 * Evaluated as a (1 - sigma(P)) + a / (e^{aP} - 1). Strictly positive and
 * strictly decreasing, unbounded as P -> 0+.
 */
inline double log_utility_slope(const SigmoidalUtility& u, double p) {
  if (!(p > 0.0)) {
    throw DomainError("log_utility_slope: power must be > 0, got " + std::to_string(p));
  }
  const double a = u.a();
  return a * logistic(-a * (p - u.b())) + a / std::expm1(a * p);
}

/// Power at which U reaches `target`. Closed form inverse of U.
inline double inverse(const SigmoidalUtility& u, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw DomainError("inverse: target must lie in (0, 1), got " + std::to_string(target));
  }
  const double s = target / u.c() + u.d();
  if (!(s < 1.0)) {
    throw DomainError("inverse: target " + std::to_string(target) +
                      " is not reachable by this utility");
  }
  // b - (1/a) ln(1/s - 1) == b + (1/a) ln(s / (1 - s))
  return u.b() + (std::log(s) - std::log1p(-s)) / u.a();
}

/// Power needed to reach a success probability of theta.
inline double qos_threshold(const SigmoidalUtility& u, double theta = kDefaultQosTarget) {
  return inverse(u, theta);
}

}  // namespace qosalloc
