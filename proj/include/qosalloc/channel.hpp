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
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qosalloc/catalog.hpp"
#include "qosalloc/errors.hpp"

namespace qosalloc {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s
inline constexpr double kDefaultCarrierHz = 2.0e9;
inline constexpr double kUrbanPathLossExponent = 3.5;

/**
 * Distance-based path loss:
 *
 *   P_UE = P_BS * f / (c * (4 pi d)^alpha)
 *
 * The expression is applied exactly as written. Note that f/c carries units of
 * 1/m while the exponent only acts on 4 pi d, so the result is dimensionally a
 * power only for alpha = 1; callers comparing against free-space formulas
 * should keep that in mind.
 */
class PathLossModel {
public:
  explicit PathLossModel(double carrier_frequency_hz = kDefaultCarrierHz,
                         double path_loss_exponent = kUrbanPathLossExponent)
      : frequency_(carrier_frequency_hz), exponent_(path_loss_exponent) {
    if (!(frequency_ > 0.0) || !std::isfinite(frequency_)) {
      throw DomainError("carrier frequency must be > 0, got " + std::to_string(frequency_));
    }
    if (!(exponent_ > 0.0) || !std::isfinite(exponent_)) {
      throw DomainError("path loss exponent must be > 0, got " + std::to_string(exponent_));
    }
  }

  double carrier_frequency() const noexcept { return frequency_; }
  double path_loss_exponent() const noexcept { return exponent_; }

private:
  double frequency_;
  double exponent_;
};

inline double received_power(const PathLossModel& m, double p_bs, double distance_m) {
  if (!(distance_m > 0.0)) {
    throw DomainError("received_power: distance must be > 0, got " + std::to_string(distance_m));
  }
  if (!(p_bs >= 0.0)) {
    throw DomainError("received_power: transmit power must be >= 0, got " + std::to_string(p_bs));
  }
  return p_bs * m.carrier_frequency() /
         (kSpeedOfLight * std::pow(4.0 * std::numbers::pi * distance_m, m.path_loss_exponent()));
}

struct CqiZone {
  int cqi;
  double near_m;  // inclusive
  double far_m;   // exclusive
};

/// Half-open distance annuli around the BS, closest zone first. CQI strictly
/// decreases with distance and the annuli tile [first.near, last.far) without
/// gaps or overlaps.
class CqiZoneMap {
public:
  explicit CqiZoneMap(std::vector<CqiZone> zones) : zones_(std::move(zones)) { validate(); }

  /// 15 equal-width annuli over [0, radius); CQI 15 nearest the BS.
  static CqiZoneMap equal_annuli(double cell_radius_m) {
    if (!(cell_radius_m > 0.0) || !std::isfinite(cell_radius_m)) {
      throw DomainError("cell radius must be > 0, got " + std::to_string(cell_radius_m));
    }
    std::vector<CqiZone> zones;
    const double width = cell_radius_m / kMaxCqi;
    for (int k = 0; k < kMaxCqi; ++k) {
      const double far = (k + 1 == kMaxCqi) ? cell_radius_m : width * (k + 1);
      zones.push_back({kMaxCqi - k, width * k, far});
    }
    return CqiZoneMap(std::move(zones));
  }

  /// Zones from consecutive boundary distances: edges[k]..edges[k+1] gets CQI 15-k.
  static CqiZoneMap from_edges(std::span<const double> edges_m) {
    if (edges_m.size() < 2 || edges_m.size() > kMaxCqi + 1) {
      throw PreconditionError("zone edges: need between 2 and 16 boundaries, got " +
                              std::to_string(edges_m.size()));
    }
    std::vector<CqiZone> zones;
    for (std::size_t k = 0; k + 1 < edges_m.size(); ++k) {
      zones.push_back({kMaxCqi - static_cast<int>(k), edges_m[k], edges_m[k + 1]});
    }
    return CqiZoneMap(std::move(zones));
  }

  std::span<const CqiZone> zones() const noexcept { return zones_; }
  double coverage_radius() const noexcept { return zones_.back().far_m; }

private:
  void validate() const {
    if (zones_.empty()) {
      throw PreconditionError("zone map must contain at least one zone");
    }
    for (std::size_t k = 0; k < zones_.size(); ++k) {
      const auto& z = zones_[k];
      if (z.cqi < kMinCqi || z.cqi > kMaxCqi) {
        throw PreconditionError("zone " + std::to_string(k) + ": cqi out of range 1..15");
      }
      if (!(z.near_m >= 0.0) || !(z.far_m > z.near_m) || !std::isfinite(z.far_m)) {
        throw PreconditionError("zone " + std::to_string(k) +
                                ": interval must satisfy 0 <= near < far");
      }
      if (k > 0) {
        const auto& prev = zones_[k - 1];
        if (z.near_m != prev.far_m) {
          throw PreconditionError("zone " + std::to_string(k) +
                                  ": intervals must be contiguous (gap or overlap)");
        }
        if (!(z.cqi < prev.cqi)) {
          throw PreconditionError("zone " + std::to_string(k) +
                                  ": cqi must decrease with distance");
        }
      }
    }
  }

  std::vector<CqiZone> zones_;
};

/// CQI of the zone containing `distance_m`, or nullopt outside coverage.
inline std::optional<int> cqi_of_distance(const CqiZoneMap& zmap, double distance_m) {
  if (!(distance_m > 0.0)) {
    throw DomainError("cqi_of_distance: distance must be > 0, got " + std::to_string(distance_m));
  }
  for (const auto& z : zmap.zones()) {
    if (distance_m >= z.near_m && distance_m < z.far_m) {
      return z.cqi;
    }
  }
  return std::nullopt;
}

}  // namespace qosalloc
