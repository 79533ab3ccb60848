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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qosalloc/catalog.hpp"
#include "qosalloc/utility.hpp"
#include "test_support.hpp"

namespace qosalloc {
namespace {

using testing::bisect_increasing;
using testing::literal_log_slope;
using testing::literal_utility;

const SigmoidalUtility kCqi1(0.8676, 6.2257);
const SigmoidalUtility kCqi15(1.6471, 2.8058);

TEST(SigmoidalUtility, RejectsNonPositiveParameters) {
  EXPECT_THROW(SigmoidalUtility(0.0, 1.0), DomainError);
  EXPECT_THROW(SigmoidalUtility(1.0, -1.0), DomainError);
  EXPECT_THROW(SigmoidalUtility(std::nan(""), 1.0), DomainError);
}

TEST(SigmoidalUtility, NormalizersFollowFromAB) {
  const double eab = std::exp(kCqi15.a() * kCqi15.b());
  EXPECT_NEAR(kCqi15.c(), (1.0 + eab) / eab, 1e-15);
  EXPECT_NEAR(kCqi15.d(), 1.0 / (1.0 + eab), 1e-15);
}

TEST(Evaluate, ZeroPowerGivesZero) {
  for (const auto& e : UtilityCatalog::entries()) {
    EXPECT_NEAR(evaluate(e.utility, 0.0), 0.0, 1e-12) << "cqi " << e.cqi_index;
  }
}

TEST(Evaluate, AtInflectionEqualsCTimesHalfMinusD) {
  const double expected = kCqi15.c() * (0.5 - kCqi15.d());
  EXPECT_NEAR(evaluate(kCqi15, kCqi15.b()), expected, 1e-14);
  // mpmath at 40 digits
  EXPECT_NEAR(evaluate(kCqi15, kCqi15.b()), 0.49508065732752913595, 1e-14);
}

TEST(Evaluate, Cqi1SaturatedAtListedQosPower) {
  EXPECT_GT(evaluate(kCqi1, 23.240), 0.999);
}

TEST(Evaluate, MatchesLiteralFormula) {
  for (const auto& e : UtilityCatalog::entries()) {
    for (double p = 0.0; p <= 40.0; p += 0.37) {
      EXPECT_NEAR(evaluate(e.utility, p), literal_utility(e.utility.a(), e.utility.b(), p), 1e-13);
    }
  }
}

TEST(Evaluate, NegativePowerIsDomainError) {
  EXPECT_THROW(evaluate(kCqi1, -1e-9), DomainError);
}

TEST(Evaluate, LargeProductDoesNotOverflow) {
  const SigmoidalUtility steep(50.0, 14.0);  // a*b = 700
  EXPECT_NEAR(evaluate(steep, 0.0), 0.0, 1e-300);
  EXPECT_TRUE(std::isfinite(evaluate(steep, 13.9)));
  EXPECT_NEAR(evaluate(steep, 14.0), 0.5, 1e-12);
  EXPECT_NEAR(evaluate(steep, 20.0), 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(log_utility_slope(steep, 13.0)));
}

TEST(Evaluate, RangeAndMonotoneOnGrid) {
  for (const auto& e : UtilityCatalog::entries()) {
    const auto& u = e.utility;
    // Strictly increasing while 1 - U is still resolvable in double precision
    // (1 - U ~ e^-30 at the top of the grid).
    const double top = u.b() + 30.0 / u.a();
    double prev = -1.0;
    for (int k = 0; k < 1000; ++k) {
      const double p = top * k / 999.0;
      const double v = evaluate(u, p);
      ASSERT_GE(v, 0.0);
      ASSERT_LT(v, 1.0);
      ASSERT_GT(v, prev) << "cqi " << e.cqi_index << " p " << p;
      prev = v;
    }
    // Beyond that the curve saturates but must never decrease or reach 1.
    for (double p = top; p <= 100.0; p += 0.1) {
      const double v = evaluate(u, p);
      ASSERT_GE(v, prev);
      ASSERT_LT(v, 1.0);
      prev = v;
    }
    EXPECT_GT(evaluate(u, u.b() + 40.0 / u.a()), 1.0 - 1e-12);
  }
}

TEST(Inverse, RoundTripAtInflection) {
  for (const auto& e : UtilityCatalog::entries()) {
    EXPECT_NEAR(inverse(e.utility, evaluate(e.utility, e.utility.b())), e.utility.b(), 1e-9);
  }
}

TEST(Inverse, RoundTripAtTargets) {
  for (const auto& e : UtilityCatalog::entries()) {
    for (double t : {0.01, 0.1, 0.5, 0.9, 0.99}) {
      EXPECT_NEAR(evaluate(e.utility, inverse(e.utility, t)), t, 1e-9);
    }
  }
}

TEST(Inverse, MatchesBisectionOracle) {
  // Bisection on the literal formula; agrees with the 40-digit values
  // 4.59970579127865 (CQI 15) and 9.62493387180652 (CQI 1).
  auto oracle = [](const SigmoidalUtility& u, double t) {
    return bisect_increasing([&](double p) { return literal_utility(u.a(), u.b(), p) - t; }, 0.0,
                             200.0);
  };
  EXPECT_NEAR(inverse(kCqi15, 0.95), oracle(kCqi15, 0.95), 1e-9);
  EXPECT_NEAR(inverse(kCqi1, 0.95), oracle(kCqi1, 0.95), 1e-9);
  EXPECT_NEAR(inverse(kCqi15, 0.95), 4.59970579127865, 1e-9);
  EXPECT_NEAR(inverse(kCqi1, 0.95), 9.62493387180652, 1e-9);
}

TEST(Inverse, DomainErrors) {
  EXPECT_THROW(inverse(kCqi1, 0.0), DomainError);
  EXPECT_THROW(inverse(kCqi1, 1.0), DomainError);
  EXPECT_THROW(inverse(kCqi1, -0.2), DomainError);
  EXPECT_THROW(inverse(kCqi1, std::nan("")), DomainError);
}

TEST(QosThreshold, DefaultsToNinetyFivePercent) {
  EXPECT_DOUBLE_EQ(qos_threshold(kCqi15), inverse(kCqi15, 0.95));
}

TEST(QosThreshold, HalfIsInverseAtHalf) {
  EXPECT_DOUBLE_EQ(qos_threshold(kCqi1, 0.5), inverse(kCqi1, 0.5));
  const SigmoidalUtility large_ab(2.0, 20.0);  // d ~ 4e-18
  EXPECT_NEAR(qos_threshold(large_ab, 0.5), 20.0, 1e-12);
}

TEST(QosThreshold, DivergesMonotonicallyTowardOne) {
  double prev = 0.0;
  for (double t : {0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999}) {
    const double p = qos_threshold(kCqi15, t);
    EXPECT_GT(p, prev);
    prev = p;
  }
  EXPECT_GT(prev, 10.0);
}

TEST(QosThreshold, DoesNotReproduceListedQosPowers) {
  // The listed per-UE QoS powers (5.213 W for CQI 15, 23.240 W for CQI 1)
  // are not the 95% points of these curves; they are consumed as inputs.
  EXPECT_GT(std::abs(qos_threshold(kCqi15) - 5.213), 0.5);
  EXPECT_GT(std::abs(qos_threshold(kCqi1) - 23.240), 10.0);
}

TEST(LogUtilitySlope, MatchesLiteralFormula) {
  for (const auto& e : UtilityCatalog::entries()) {
    for (double p : {0.5, 1.0, 5.0, 10.0, 20.0}) {
      const double lit = literal_log_slope(e.utility.a(), e.utility.b(), p);
      EXPECT_NEAR(log_utility_slope(e.utility, p), lit, 1e-12 * std::max(1.0, lit));
    }
  }
}

TEST(LogUtilitySlope, CentralDifferenceOracle) {
  const double h = 1e-5;
  for (const auto& e : UtilityCatalog::entries()) {
    const double a = e.utility.a();
    const double b = e.utility.b();
    for (double p : {1.0, 5.0, 10.0, 20.0}) {
      const double fd =
          (std::log(literal_utility(a, b, p + h)) - std::log(literal_utility(a, b, p - h))) / (2 * h);
      EXPECT_NEAR(log_utility_slope(e.utility, p), fd, 1e-6) << "cqi " << e.cqi_index << " p " << p;
    }
  }
}

TEST(LogUtilitySlope, AtInflection) {
  const double expected = kCqi15.a() * 0.25 / (0.5 - kCqi15.d());
  EXPECT_NEAR(log_utility_slope(kCqi15, kCqi15.b()), expected, 1e-13);
  EXPECT_NEAR(log_utility_slope(kCqi15, kCqi15.b()), 0.83991632172132371375, 1e-13);
}

TEST(LogUtilitySlope, StrictlyDecreasingAndUnboundedAtZero) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(1e-3, 60.0);
  for (const auto& e : UtilityCatalog::entries()) {
    for (int k = 0; k < 200; ++k) {
      double p1 = dist(rng), p2 = dist(rng);
      if (p1 == p2) continue;
      if (p1 > p2) std::swap(p1, p2);
      ASSERT_GT(log_utility_slope(e.utility, p1), log_utility_slope(e.utility, p2));
    }
    EXPECT_GT(log_utility_slope(e.utility, 1e-12), 1e11);
    EXPECT_GT(log_utility_slope(e.utility, 100.0), 0.0);
  }
}

TEST(LogUtilitySlope, NonPositivePowerIsDomainError) {
  EXPECT_THROW(log_utility_slope(kCqi1, 0.0), DomainError);
  EXPECT_THROW(log_utility_slope(kCqi1, -3.0), DomainError);
}

TEST(LogUtility, IsLogOfEvaluate) {
  for (double p : {1e-6, 0.3, 4.0, 12.0, 50.0}) {
    EXPECT_NEAR(log_utility(kCqi1, p), std::log(evaluate(kCqi1, p)), 1e-12);
  }
  EXPECT_EQ(log_utility(kCqi1, 0.0), -std::numeric_limits<double>::infinity());
}

TEST(Catalog, LookupReturnsTableRows) {
  const auto e1 = catalog_lookup(1);
  EXPECT_EQ(e1.cqi_index, 1);
  EXPECT_EQ(e1.modulation, Modulation::QPSK);
  EXPECT_EQ(e1.code_rate_x1024, 78);
  EXPECT_EQ(e1.efficiency, 0.1523);
  EXPECT_EQ(e1.utility.a(), 0.8676);
  EXPECT_EQ(e1.utility.b(), 6.2257);

  const auto e10 = catalog_lookup(10);
  EXPECT_EQ(e10.modulation, Modulation::QAM64);
  EXPECT_EQ(e10.code_rate_x1024, 466);
  EXPECT_EQ(e10.efficiency, 2.7305);
  EXPECT_EQ(e10.utility.a(), 0.3697);
  EXPECT_EQ(e10.utility.b(), 12.5005);

  EXPECT_EQ(to_string(catalog_lookup(7).modulation), "16QAM");
}

TEST(Catalog, OutOfRangeIsLookupError) {
  EXPECT_THROW(catalog_lookup(0), LookupError);
  EXPECT_THROW(catalog_lookup(16), LookupError);
}

TEST(Catalog, IndicesCompleteAndEfficiencyIncreasing) {
  const auto entries = UtilityCatalog::entries();
  ASSERT_EQ(entries.size(), 15u);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    EXPECT_EQ(entries[i].cqi_index, static_cast<int>(i) + 1);
    if (i > 0) {
      EXPECT_GT(entries[i].efficiency, entries[i - 1].efficiency);
    }
  }
}

}  // namespace
}  // namespace qosalloc
