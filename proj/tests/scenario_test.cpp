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

#include <sstream>
#include <string>

#include "qosalloc/report.hpp"
#include "qosalloc/scenario.hpp"

namespace qosalloc {
namespace {

bool has_message(const std::vector<Diagnostic>& diags, const std::string& needle) {
  for (const auto& d : diags) {
    if (d.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

constexpr const char* kMinimal = R"(
# two UEs
p_total_w = 20.0
mode = "baseline"

[convergence]
delta = 1e-7
w_init = 0.5

[[ue]]
id = 1
cqi = 15

[[ue]]
id = 2
a = 0.5
b = 9.0
qos_power_w = 8.0
)";

TEST(ParseScenario, ReadsAllSections) {
  const auto sc = parse_scenario_text(kMinimal);
  EXPECT_EQ(sc.p_total_w, 20.0);
  EXPECT_EQ(sc.mode, RunMode::Baseline);
  EXPECT_EQ(sc.convergence.delta, 1e-7);
  EXPECT_EQ(sc.convergence.w_init, 0.5);
  EXPECT_EQ(sc.convergence.l1, ConvergenceConfig{}.l1);
  ASSERT_EQ(sc.ues.size(), 2u);
  EXPECT_EQ(sc.ues[0].cqi, 15);
  EXPECT_EQ(sc.ues[1].a, 0.5);
  EXPECT_EQ(sc.ues[1].line, 14);
  EXPECT_TRUE(validate_scenario(sc, sc.mode).empty());
}

TEST(ParseScenario, SyntaxErrorsCarryLineNumbers) {
  try {
    parse_scenario_text("p_total_w = 10\nbogus = = 3\n");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(std::string(e.what()).rfind("line 2: ", 0), 0u) << e.what();
  }
  EXPECT_THROW(parse_scenario_text("p_total_w = 10\nunknown_key = 1\n"), ScenarioError);
  EXPECT_THROW(parse_scenario_text("p_total_w = 10\np_total_w = 11\n"), ScenarioError);
  EXPECT_THROW(parse_scenario_text("p_total_w = 10\n[[ue]]\ncqi = 3\n"), ScenarioError);
  EXPECT_THROW(parse_scenario_text("mode = \"both\"\n"), ScenarioError);
  EXPECT_THROW(parse_scenario_text("p_total_w = 10\nmode = \"sometimes\"\n"), ScenarioError);
  EXPECT_THROW(parse_scenario_text("p_total_w = 10\n[extras]\n"), ScenarioError);
}

TEST(ValidateScenario, RangeErrors) {
  const auto sc = parse_scenario_text(R"(
p_total_w = -5
[[ue]]
id = 1
cqi = 16
[[ue]]
id = 1
cqi = 3
a = 1.0
b = 2.0
)");
  const auto d = validate_scenario(sc, RunMode::Baseline);
  EXPECT_TRUE(has_message(d, "p_total_w must be > 0"));
  EXPECT_TRUE(has_message(d, "ue 1: cqi out of range 1..15"));
  EXPECT_TRUE(has_message(d, "duplicate id"));
  EXPECT_TRUE(has_message(d, "exactly one of cqi"));
  EXPECT_EQ(d.front().line, 2);
}

TEST(ValidateScenario, PowerLimitModeNeedsLimits) {
  const auto sc = parse_scenario_text(kMinimal);
  const auto d = validate_scenario(sc, RunMode::PowerLimit);
  EXPECT_TRUE(has_message(d, "ue 1: missing power_limit_w (required for power-limit mode)"));
  EXPECT_THROW(resolve_ues(sc, RunMode::Both), ScenarioError);
}

TEST(ValidateScenario, DistanceNeedsChannel) {
  const auto sc = parse_scenario_text("p_total_w = 10\n[[ue]]\nid = 4\ndistance_m = 30\n");
  EXPECT_TRUE(has_message(validate_scenario(sc, RunMode::Baseline), "requires a [channel] table"));
}

TEST(ResolveUes, QosPowerPrecedence) {
  const auto sc = parse_scenario_text(kMinimal);
  const auto ues = resolve_ues(sc, RunMode::Baseline);
  ASSERT_EQ(ues.size(), 2u);
  EXPECT_DOUBLE_EQ(ues[0].profile.qos_power, qos_threshold(catalog_lookup(15).utility, 0.95));
  EXPECT_EQ(ues[1].profile.qos_power, 8.0);
  EXPECT_EQ(ues[1].cqi, std::nullopt);
  EXPECT_FALSE(ues[0].has_power_limit);
}

TEST(ResolveUes, DistanceMapsThroughZones) {
  const auto sc = parse_scenario_text(R"(
p_total_w = 10
[channel]
cell_radius_m = 1500
[[ue]]
id = 1
distance_m = 50
power_limit_w = 4
[[ue]]
id = 2
distance_m = 1450
power_limit_w = 4
)");
  const auto ues = resolve_ues(sc, RunMode::PowerLimit);
  EXPECT_EQ(ues[0].cqi, 15);
  EXPECT_EQ(ues[1].cqi, 1);
  EXPECT_EQ(ues[1].profile.qos_power, 4.0);
}

TEST(Report, CsvHeadersAndRows) {
  const auto sc = parse_scenario_text(kMinimal);
  const auto ues = resolve_ues(sc, RunMode::Baseline);
  const auto r = run_baseline(profiles_of(ues), sc.p_total_w, sc.convergence);
  std::ostringstream alloc, traj;
  write_allocations_csv(alloc, r, ues);
  write_trajectory_csv(traj, r);
  std::istringstream a(alloc.str());
  std::string line;
  std::getline(a, line);
  EXPECT_EQ(line, "ue_id,cqi,power_limit_w,allocated_w,reached_qos");
  std::getline(a, line);
  EXPECT_EQ(line.rfind("1,15,,", 0), 0u) << line;
  std::getline(a, line);
  EXPECT_EQ(line.rfind("2,,,", 0), 0u) << line;
  EXPECT_EQ(traj.str().rfind("iteration,ue_id,bid,shadow_price\n1,1,0.5,0.05\n", 0), 0u);
}

TEST(Report, JsonSummary) {
  const auto sc = parse_scenario_text(kMinimal);
  const auto ues = resolve_ues(sc, RunMode::Baseline);
  const auto r = run_baseline(profiles_of(ues), sc.p_total_w, sc.convergence);
  const auto j = report_json(r, ues);
  EXPECT_EQ(j["mode"], "baseline");
  EXPECT_EQ(j["ue_count"], 2);
  EXPECT_EQ(j["converged"], true);
  EXPECT_EQ(j["per_ue"][0]["cqi"], 15);
  EXPECT_TRUE(j["per_ue"][1]["cqi"].is_null());
  EXPECT_NEAR(j["allocated_total_w"].get<double>(), 20.0, 1e-4);
  EXPECT_EQ(summary_line(r, r), "PL: " + std::to_string(r.qos_reached_count()) + "/2 reach QoS; baseline: " +
                                    std::to_string(r.qos_reached_count()) + "/2");
}

TEST(Report, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
}

}  // namespace
}  // namespace qosalloc
