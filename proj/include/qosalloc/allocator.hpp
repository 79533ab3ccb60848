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

// Distributed bidding allocation of a base-station power budget among UEs
// with sigmoidal utilities, simulated as synchronous rounds.
//
// Round n:
//   1. BS: if every active UE changed its bid by less than delta, stop and
//      allocate P_i = w_i(n) / p(n). Otherwise broadcast the shadow price
//      p(n) = sum_i w_i(n) / P_T.
//   2. UE i: solve P_i(n) = argmax log U_i(P) - p(n) P over (0, P_T].
//      Power-limit mode only: if P_i(n) exceeds the UE's power limit, the UE
//      takes P_i(n), leaves the auction and P_T shrinks by P_i(n).
//   3. Remaining UEs bid w_i(n+1) = p(n) P_i(n), moved at most
//      l1 * e^{-n / l2} away from w_i(n).
//
// Baseline mode is the same loop with step 2's exit branch disabled.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qosalloc/errors.hpp"
#include "qosalloc/utility.hpp"

namespace qosalloc {

enum class AllocationMode { Baseline, PowerLimit };

inline const char* to_string(AllocationMode m) noexcept {
  return m == AllocationMode::Baseline ? "baseline" : "power-limit";
}

struct ConvergenceConfig {
  double delta = 1e-6;     // bid-change tolerance
  double l1 = 10.0;        // fluctuation cap scale
  double l2 = 20.0;        // fluctuation cap decay length (iterations)
  double w_init = 1.0;     // initial bid of every UE
  int max_iterations = 10000;
  double root_tolerance = 1e-8;  // watts, UE subproblem bisection

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || std::isnan(v)) {
        throw DomainError(std::string("convergence config: ") + name + " must be > 0");
      }
    };
    positive(delta, "delta");
    positive(l1, "l1");
    positive(l2, "l2");
    positive(w_init, "w_init");
    positive(root_tolerance, "root_tolerance");
    if (max_iterations < 1) {
      throw DomainError("convergence config: max_iterations must be >= 1");
    }
  }
};

/// Static description of one UE taking part in the auction.
struct UeProfile {
  int id;
  SigmoidalUtility utility;
  // Exit threshold in power-limit mode; ignored by the baseline.
  double power_limit = std::numeric_limits<double>::infinity();
  // Power at which the UE counts as having reached its QoS.
  double qos_power = std::numeric_limits<double>::infinity();
};

enum class UeStatus { Active, Exited, Converged };

inline const char* to_string(UeStatus s) noexcept {
  switch (s) {
    case UeStatus::Active:
      return "active";
    case UeStatus::Exited:
      return "exited";
    case UeStatus::Converged:
      return "converged";
  }
  return "?";
}

/// A bidding participant. Bids are append-only; once the UE has exited or
/// converged its status and final power are frozen.
class UeAgent {
public:
  UeAgent(UeProfile profile, double initial_bid) : profile_(std::move(profile)) {
    bids_.push_back(initial_bid);
  }

  const UeProfile& profile() const noexcept { return profile_; }
  int id() const noexcept { return profile_.id; }
  UeStatus status() const noexcept { return status_; }
  bool active() const noexcept { return status_ == UeStatus::Active; }
  double final_power() const noexcept { return final_power_; }
  int exit_iteration() const noexcept { return exit_iteration_; }

  std::span<const double> bids() const noexcept { return bids_; }
  double current_bid() const noexcept { return bids_.back(); }
  // w_i(0) = 0 before the first bid.
  double previous_bid() const noexcept {
    return bids_.size() >= 2 ? bids_[bids_.size() - 2] : 0.0;
  }

  void submit_bid(double w) {
    require_active("submit_bid");
    bids_.push_back(w);
  }

  void exit_with(double power, int iteration) {
    require_active("exit_with");
    status_ = UeStatus::Exited;
    final_power_ = power;
    exit_iteration_ = iteration;
  }

  void converge_with(double power) {
    require_active("converge_with");
    status_ = UeStatus::Converged;
    final_power_ = power;
  }

  // Non-converged termination: the power is recorded, the UE stays Active.
  void assign_unconverged(double power) {
    require_active("assign_unconverged");
    final_power_ = power;
  }

private:
  void require_active(const char* op) const {
    if (status_ != UeStatus::Active) {
      throw std::logic_error(std::string(op) + ": UE " + std::to_string(profile_.id) +
                             " is no longer active");
    }
  }

  UeProfile profile_;
  UeStatus status_ = UeStatus::Active;
  double final_power_ = 0.0;
  int exit_iteration_ = 0;
  std::vector<double> bids_;
};

struct BsState {
  double remaining_power;  // P_T, only decreases when a UE exits
  double price = 0.0;      // p(n)
  int iteration = 0;
};

struct TrajectoryPoint {
  int iteration;
  int ue_id;
  double bid;
  double shadow_price;
};

struct UeOutcome {
  int id;
  double power;  // P_i^opt
  bool reached_qos;
  UeStatus status;
  int exit_iteration;  // 0 unless the UE exited
};

struct AllocationResult {
  AllocationMode mode = AllocationMode::Baseline;
  double initial_power = 0.0;
  double remaining_power = 0.0;  // P_T after exits
  ConvergenceConfig config;
  std::vector<UeOutcome> ues;  // in input order
  int iterations = 0;
  bool converged = false;
  bool infeasible = false;
  std::vector<double> prices;  // p(n), n = 1..iterations
  std::vector<TrajectoryPoint> trajectory;

  int qos_reached_count() const {
    return static_cast<int>(
        std::count_if(ues.begin(), ues.end(), [](const UeOutcome& o) { return o.reached_qos; }));
  }

  double total_power() const {
    return std::accumulate(ues.begin(), ues.end(), 0.0,
                           [](double s, const UeOutcome& o) { return s + o.power; });
  }

  double final_price() const { return prices.empty() ? 0.0 : prices.back(); }
};

/// Bid-change cap l1 * e^{-n / l2}; strictly decreasing in n.
inline double fluctuation_decay(int n, double l1, double l2) {
  if (n < 1) {
    throw DomainError("fluctuation_decay: iteration must be >= 1, got " + std::to_string(n));
  }
  if (!(l1 > 0.0) || !(l2 > 0.0)) {
    throw DomainError("fluctuation_decay: l1 and l2 must be > 0");
  }
  return l1 * std::exp(-static_cast<double>(n) / l2);
}

/// Shadow price: total active bids per watt of remaining budget.
inline double bs_step(std::span<const double> bids, double remaining_power) {
  if (!(remaining_power > 0.0)) {
    throw DomainError("bs_step: remaining power must be > 0, got " +
                      std::to_string(remaining_power));
  }
  return std::accumulate(bids.begin(), bids.end(), 0.0) / remaining_power;
}

/**
 * Power maximizing log U(P) - price * P over (0, p_max].
 *
 * The log-utility slope decreases strictly from +infinity, so the optimum is
 * the unique root of slope(P) = price, or p_max when slope(p_max) >= price.
 * Found by bisection to `tolerance` watts.
 */
inline double solve_ue_subproblem(const SigmoidalUtility& u, double price, double p_max,
                                  double tolerance = 1e-8) {
  if (!(price > 0.0)) {
    throw DomainError("solve_ue_subproblem: price must be > 0, got " + std::to_string(price));
  }
  if (!(p_max > 0.0)) {
    throw DomainError("solve_ue_subproblem: p_max must be > 0, got " + std::to_string(p_max));
  }
  if (!(tolerance > 0.0)) {
    throw DomainError("solve_ue_subproblem: tolerance must be > 0");
  }
  if (log_utility_slope(u, p_max) >= price) {
    return p_max;
  }
  double lo = 0.0;
  double hi = p_max;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval below double resolution
    if (log_utility_slope(u, mid) > price) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Deterministic synchronous simulation of the UE/BS bidding exchange.
class BiddingSimulation {
public:
  BiddingSimulation(AllocationMode mode, std::span<const UeProfile> ues, double total_power,
                    ConvergenceConfig cfg)
      : mode_(mode), cfg_(cfg), bs_{total_power} {
    if (!(total_power > 0.0) || !std::isfinite(total_power)) {
      throw DomainError("total power must be finite and > 0, got " + std::to_string(total_power));
    }
    if (ues.empty()) {
      throw PreconditionError("allocation needs at least one UE");
    }
    cfg_.validate();
    for (const auto& ue : ues) {
      if (mode_ == AllocationMode::PowerLimit && !(ue.power_limit > 0.0)) {
        throw DomainError("UE " + std::to_string(ue.id) + ": power limit must be > 0");
      }
      agents_.emplace_back(ue, cfg_.w_init);
    }
    result_.mode = mode_;
    result_.initial_power = total_power;
    result_.config = cfg_;
  }

  AllocationResult run() && {
    for (int n = 1;; ++n) {
      bs_.iteration = n;
      if (round(n)) break;
    }
    finish();
    return std::move(result_);
  }

private:
  // Returns true when the simulation has terminated.
  bool round(int n) {
    std::vector<UeAgent*> active;
    for (auto& a : agents_) {
      if (a.active()) active.push_back(&a);
    }
    const bool settled = std::all_of(active.begin(), active.end(), [&](const UeAgent* a) {
      return std::abs(a->current_bid() - a->previous_bid()) < cfg_.delta;
    });

    if (active.empty()) {
      result_.converged = true;
      return true;
    }
    if (!(bs_.remaining_power > 0.0)) {
      // Exits consumed the whole budget; nothing left for the others.
      result_.infeasible = true;
      for (auto* a : active) a->converge_with(0.0);
      return true;
    }

    std::vector<double> bids;
    bids.reserve(active.size());
    for (const auto* a : active) bids.push_back(a->current_bid());
    bs_.price = bs_step(bids, bs_.remaining_power);
    result_.prices.push_back(bs_.price);
    for (const auto* a : active) {
      result_.trajectory.push_back({n, a->id(), a->current_bid(), bs_.price});
    }

    if (settled) {
      for (auto* a : active) a->converge_with(a->current_bid() / bs_.price);
      result_.converged = true;
      return true;
    }
    if (n >= cfg_.max_iterations) {
      for (auto* a : active) a->assign_unconverged(a->current_bid() / bs_.price);
      return true;
    }

    std::vector<double> solved;
    solved.reserve(active.size());
    for (const auto* a : active) {
      solved.push_back(solve_ue_subproblem(a->profile().utility, bs_.price, bs_.remaining_power,
                                           cfg_.root_tolerance));
    }

    if (mode_ == AllocationMode::PowerLimit) {
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (solved[k] > active[k]->profile().power_limit) {
          active[k]->exit_with(solved[k], n);
          bs_.remaining_power -= solved[k];
          if (bs_.remaining_power < 0.0) {
            result_.infeasible = true;
            bs_.remaining_power = 0.0;
          }
        }
      }
    }

    const double cap = fluctuation_decay(n, cfg_.l1, cfg_.l2);
    for (std::size_t k = 0; k < active.size(); ++k) {
      auto* a = active[k];
      if (!a->active()) continue;
      const double previous = a->current_bid();
      double bid = bs_.price * solved[k];
      if (std::abs(bid - previous) > cap) {
        bid = previous + std::copysign(cap, bid - previous);
      }
      a->submit_bid(bid);
    }
    return false;
  }

  void finish() {
    result_.iterations = bs_.iteration;
    result_.remaining_power = bs_.remaining_power;
    for (const auto& a : agents_) {
      result_.ues.push_back({a.id(), a.final_power(), a.final_power() >= a.profile().qos_power,
                             a.status(), a.exit_iteration()});
    }
  }

  AllocationMode mode_;
  ConvergenceConfig cfg_;
  BsState bs_;
  std::vector<UeAgent> agents_;
  AllocationResult result_;
};

inline AllocationResult run_allocation(AllocationMode mode, std::span<const UeProfile> ues,
                                       double total_power, const ConvergenceConfig& cfg = {}) {
  return BiddingSimulation(mode, ues, total_power, cfg).run();
}

inline AllocationResult run_baseline(std::span<const UeProfile> ues, double total_power,
                                     const ConvergenceConfig& cfg = {}) {
  return run_allocation(AllocationMode::Baseline, ues, total_power, cfg);
}

inline AllocationResult run_with_power_limits(std::span<const UeProfile> ues, double total_power,
                                              const ConvergenceConfig& cfg = {}) {
  return run_allocation(AllocationMode::PowerLimit, ues, total_power, cfg);
}

}  // namespace qosalloc
