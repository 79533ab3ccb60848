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

#include <array>
#include <string>
#include <string_view>
#include <utility>

#include "qosalloc/errors.hpp"
#include "qosalloc/utility.hpp"

namespace qosalloc {

enum class Modulation { QPSK, QAM16, QAM64 };

inline std::string_view to_string(Modulation m) noexcept {
  switch (m) {
    case Modulation::QPSK:
      return "QPSK";
    case Modulation::QAM16:
      return "16QAM";
    case Modulation::QAM64:
      return "64QAM";
  }
  return "?";
}

inline constexpr int kMinCqi = 1;
inline constexpr int kMaxCqi = 15;

struct CqiEntry {
  int cqi_index;
  Modulation modulation;
  int code_rate_x1024;
  double efficiency;  // bits per symbol
  SigmoidalUtility utility;
};

namespace detail {

struct CqiRow {
  int cqi;
  Modulation modulation;
  int code_rate_x1024;
  double efficiency;
  double a;
  double b;
};

// LTE CQI table with sigmoid parameters fitted to the per-CQI
// success-probability curves.
inline constexpr std::array<CqiRow, kMaxCqi> kCqiTable{{
    {1, Modulation::QPSK, 78, 0.1523, 0.8676, 6.2257},
    {2, Modulation::QPSK, 120, 0.2344, 0.8761, 6.1657},
    {3, Modulation::QPSK, 193, 0.3880, 0.8466, 6.3812},
    {4, Modulation::QPSK, 308, 0.6016, 0.8244, 6.5526},
    {5, Modulation::QPSK, 449, 0.8770, 0.8789, 6.1467},
    {6, Modulation::QPSK, 602, 1.1758, 1.0188, 5.3029},
    {7, Modulation::QAM16, 378, 1.4766, 0.5077, 9.8303},
    {8, Modulation::QAM16, 490, 1.9141, 0.6086, 8.1999},
    {9, Modulation::QAM16, 616, 2.4063, 0.7524, 6.6333},
    {10, Modulation::QAM64, 466, 2.7305, 0.3697, 12.5005},
    {11, Modulation::QAM64, 567, 3.3223, 0.4722, 9.7873},
    {12, Modulation::QAM64, 666, 3.9023, 0.6248, 7.3974},
    {13, Modulation::QAM64, 722, 4.5234, 0.8376, 5.5177},
    {14, Modulation::QAM64, 873, 5.1152, 1.1510, 4.0153},
    {15, Modulation::QAM64, 948, 5.5547, 1.6471, 2.8058},
}};

}  // namespace detail

/// Immutable view over the 15-row CQI catalog.
class UtilityCatalog {
public:
  static constexpr std::size_t size() noexcept { return detail::kCqiTable.size(); }

  static CqiEntry at(int cqi) {
    if (cqi < kMinCqi || cqi > kMaxCqi) {
      throw LookupError("cqi " + std::to_string(cqi) + " out of range 1..15");
    }
    const auto& r = detail::kCqiTable[static_cast<std::size_t>(cqi - 1)];
    return CqiEntry{r.cqi, r.modulation, r.code_rate_x1024, r.efficiency,
                    SigmoidalUtility(r.a, r.b)};
  }

  static std::array<CqiEntry, kMaxCqi> entries() {
    return [&]<std::size_t... I>(std::index_sequence<I...>) {
      return std::array<CqiEntry, kMaxCqi>{at(static_cast<int>(I) + 1)...};
    }(std::make_index_sequence<kMaxCqi>{});
  }
};

inline CqiEntry catalog_lookup(int cqi) { return UtilityCatalog::at(cqi); }

}  // namespace qosalloc
