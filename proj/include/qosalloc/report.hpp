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

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "qosalloc/allocator.hpp"
#include "qosalloc/scenario.hpp"

namespace qosalloc {

inline constexpr const char* kAllocationsHeader = "ue_id,cqi,power_limit_w,allocated_w,reached_qos";
inline constexpr const char* kTrajectoryHeader = "iteration,ue_id,bid,shadow_price";

/// Fixed 12-significant-digit rendering so reruns are byte-identical.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_allocations_csv(std::ostream& out, const AllocationResult& result,
                                  std::span<const ResolvedUe> ues) {
  out << kAllocationsHeader << '\n';
  for (std::size_t i = 0; i < result.ues.size(); ++i) {
    const auto& o = result.ues[i];
    const auto& ue = ues[i];
    out << o.id << ',' << (ue.cqi ? std::to_string(*ue.cqi) : "") << ','
        << (ue.has_power_limit ? format_number(ue.profile.power_limit) : "") << ','
        << format_number(o.power) << ',' << (o.reached_qos ? "true" : "false") << '\n';
  }
}

inline void write_trajectory_csv(std::ostream& out, const AllocationResult& result) {
  out << kTrajectoryHeader << '\n';
  for (const auto& t : result.trajectory) {
    out << t.iteration << ',' << t.ue_id << ',' << format_number(t.bid) << ','
        << format_number(t.shadow_price) << '\n';
  }
}

inline nlohmann::json config_json(const ConvergenceConfig& c) {
  return {{"delta", c.delta},   {"l1", c.l1},
          {"l2", c.l2},         {"w_init", c.w_init},
          {"max_iterations", c.max_iterations}, {"root_tolerance", c.root_tolerance}};
}

inline nlohmann::json report_json(const AllocationResult& result, std::span<const ResolvedUe> ues) {
  nlohmann::json per_ue = nlohmann::json::array();
  for (std::size_t i = 0; i < result.ues.size(); ++i) {
    const auto& o = result.ues[i];
    nlohmann::json row{{"ue_id", o.id},
                       {"allocated_w", o.power},
                       {"reached_qos", o.reached_qos},
                       {"status", to_string(o.status)},
                       {"qos_power_w", ues[i].profile.qos_power}};
    row["cqi"] = ues[i].cqi ? nlohmann::json(*ues[i].cqi) : nlohmann::json(nullptr);
    row["power_limit_w"] =
        ues[i].has_power_limit ? nlohmann::json(ues[i].profile.power_limit) : nlohmann::json(nullptr);
    if (o.status == UeStatus::Exited) row["exit_iteration"] = o.exit_iteration;
    per_ue.push_back(std::move(row));
  }
  return {{"mode", to_string(result.mode)},
          {"p_total_w", result.initial_power},
          {"iterations", result.iterations},
          {"converged", result.converged},
          {"infeasible", result.infeasible},
          {"final_price", result.final_price()},
          {"allocated_total_w", result.total_power()},
          {"qos_reached_count", result.qos_reached_count()},
          {"ue_count", result.ues.size()},
          {"convergence", config_json(result.config)},
          {"per_ue", std::move(per_ue)}};
}

/// Side-by-side baseline vs power-limit report.
inline nlohmann::json comparison_json(const AllocationResult& baseline,
                                      const AllocationResult& limited,
                                      std::span<const ResolvedUe> ues) {
  nlohmann::json per_ue = nlohmann::json::array();
  for (std::size_t i = 0; i < ues.size(); ++i) {
    const auto& b = baseline.ues[i];
    const auto& l = limited.ues[i];
    nlohmann::json row{{"ue_id", b.id},
                       {"qos_power_w", ues[i].profile.qos_power},
                       {"baseline_w", b.power},
                       {"baseline_reached_qos", b.reached_qos},
                       {"power_limit_mode_w", l.power},
                       {"power_limit_reached_qos", l.reached_qos},
                       {"power_limit_status", to_string(l.status)}};
    row["cqi"] = ues[i].cqi ? nlohmann::json(*ues[i].cqi) : nlohmann::json(nullptr);
    row["limit_w"] =
        ues[i].has_power_limit ? nlohmann::json(ues[i].profile.power_limit) : nlohmann::json(nullptr);
    per_ue.push_back(std::move(row));
  }
  return {{"mode", "both"},
          {"p_total_w", baseline.initial_power},
          {"iterations", {{"baseline", baseline.iterations}, {"power_limit", limited.iterations}}},
          {"converged", {{"baseline", baseline.converged}, {"power_limit", limited.converged}}},
          {"qos_reached_count",
           {{"baseline", baseline.qos_reached_count()}, {"power_limit", limited.qos_reached_count()}}},
          {"ue_count", ues.size()},
          {"per_ue", std::move(per_ue)}};
}

inline std::string summary_line(const AllocationResult& baseline, const AllocationResult& limited) {
  const auto n = std::to_string(baseline.ues.size());
  return "PL: " + std::to_string(limited.qos_reached_count()) + "/" + n +
         " reach QoS; baseline: " + std::to_string(baseline.qos_reached_count()) + "/" + n;
}

}  // namespace qosalloc
