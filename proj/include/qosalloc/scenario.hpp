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

// Scenario files: a small TOML subset.
//
//   p_total_w = 150.0          # required
//   qos_target = 0.95
//   mode = "both"              # baseline | power-limit | both
//   output_dir = "out"
//
//   [convergence]              # delta, l1, l2, w_init, max_iterations, root_tolerance
//   [channel]                  # carrier_frequency_hz, path_loss_exponent,
//                              # cell_radius_m | zone_edges_m = [..]
//   [[ue]]                     # id, cqi | (a, b) | distance_m,
//                              # power_limit_w, qos_power_w
//
// Values are numbers, booleans, "strings" or flat numeric arrays. Comments
// start with '#'. Every error carries the 1-based line it refers to.

#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qosalloc/allocator.hpp"
#include "qosalloc/catalog.hpp"
#include "qosalloc/channel.hpp"
#include "qosalloc/utility.hpp"

namespace qosalloc {

class ScenarioError : public std::runtime_error {
public:
  ScenarioError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

struct Diagnostic {
  int line;  // 0 when not tied to a line
  std::string message;

  std::string to_string() const {
    return line > 0 ? "line " + std::to_string(line) + ": " + message : message;
  }
};

namespace toml_lite {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct Entry {
  Value value;
  int line;
};

struct Table {
  int line = 0;
  std::map<std::string, Entry> entries;
};

struct Document {
  Table root;
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> arrays;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

inline double parse_number(const std::string& text, int line) {
  std::string cleaned;
  for (char c : text) {
    if (c != '_') cleaned.push_back(c);
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(cleaned, &used);
    if (used == cleaned.size() && std::isfinite(v)) return v;
  } catch (const std::logic_error&) {
  }
  throw ScenarioError(line, "invalid value '" + text + "'");
}

inline Value parse_value(const std::string& text, int line) {
  if (text.empty()) throw ScenarioError(line, "missing value");
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw ScenarioError(line, "unterminated string");
    return text.substr(1, text.size() - 2);
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw ScenarioError(line, "unterminated array");
    std::vector<double> out;
    const std::string body = trim(text.substr(1, text.size() - 2));
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;  // trailing comma
      out.push_back(parse_number(item, line));
    }
    return out;
  }
  return parse_number(text, line);
}

}  // namespace detail

inline Document parse(std::istream& in) {
  Document doc;
  Table* current = &doc.root;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;

    if (line.rfind("[[", 0) == 0) {
      if (line.size() < 4 || line.substr(line.size() - 2) != "]]") {
        throw ScenarioError(line_no, "malformed table array header");
      }
      const std::string name = detail::trim(line.substr(2, line.size() - 4));
      if (!detail::valid_key(name)) throw ScenarioError(line_no, "invalid table name");
      auto& arr = doc.arrays[name];
      arr.push_back(Table{line_no, {}});
      current = &arr.back();
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError(line_no, "malformed table header");
      const std::string name = detail::trim(line.substr(1, line.size() - 2));
      if (!detail::valid_key(name)) throw ScenarioError(line_no, "invalid table name");
      if (doc.tables.count(name)) throw ScenarioError(line_no, "duplicate table [" + name + "]");
      current = &doc.tables[name];
      current->line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError(line_no, "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    if (!detail::valid_key(key)) throw ScenarioError(line_no, "invalid key '" + key + "'");
    if (current->entries.count(key)) throw ScenarioError(line_no, "duplicate key '" + key + "'");
    current->entries.emplace(key, Entry{detail::parse_value(detail::trim(line.substr(eq + 1)), line_no),
                                        line_no});
  }
  return doc;
}

}  // namespace toml_lite

struct UeSpec {
  int line = 0;
  int id = 0;
  std::optional<int> cqi;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> distance_m;
  std::optional<double> power_limit_w;
  std::optional<double> qos_power_w;
};

struct ChannelSpec {
  int line = 0;
  double carrier_frequency_hz = kDefaultCarrierHz;
  double path_loss_exponent = kUrbanPathLossExponent;
  std::optional<double> cell_radius_m;
  std::optional<std::vector<double>> zone_edges_m;
};

enum class RunMode { Baseline, PowerLimit, Both };

inline std::optional<RunMode> parse_run_mode(const std::string& s) {
  if (s == "baseline") return RunMode::Baseline;
  if (s == "power-limit") return RunMode::PowerLimit;
  if (s == "both") return RunMode::Both;
  return std::nullopt;
}

inline const char* to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::Baseline:
      return "baseline";
    case RunMode::PowerLimit:
      return "power-limit";
    case RunMode::Both:
      return "both";
  }
  return "?";
}

struct Scenario {
  double p_total_w = 0.0;
  int p_total_line = 0;
  double qos_target = kDefaultQosTarget;
  int qos_target_line = 0;
  RunMode mode = RunMode::Both;
  std::string output_dir = "out";
  ConvergenceConfig convergence;
  int convergence_line = 0;
  std::optional<ChannelSpec> channel;
  std::vector<UeSpec> ues;
};

namespace detail {

class TableReader {
public:
  TableReader(const toml_lite::Table& table, std::string context)
      : table_(table), context_(std::move(context)) {}

  std::optional<double> number(const std::string& key) {
    const auto* e = take(key);
    if (!e) return std::nullopt;
    if (const auto* v = std::get_if<double>(&e->value)) return *v;
    throw ScenarioError(e->line, context_ + key + " must be a number");
  }

  std::optional<int> integer(const std::string& key) {
    const auto* e = take(key);
    if (!e) return std::nullopt;
    const auto* v = std::get_if<double>(&e->value);
    if (!v || *v != std::floor(*v) || std::abs(*v) > 1e9) {
      throw ScenarioError(e->line, context_ + key + " must be an integer");
    }
    return static_cast<int>(*v);
  }

  std::optional<std::string> string(const std::string& key) {
    const auto* e = take(key);
    if (!e) return std::nullopt;
    if (const auto* v = std::get_if<std::string>(&e->value)) return *v;
    throw ScenarioError(e->line, context_ + key + " must be a string");
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const auto* e = take(key);
    if (!e) return std::nullopt;
    if (const auto* v = std::get_if<std::vector<double>>(&e->value)) return *v;
    throw ScenarioError(e->line, context_ + key + " must be an array of numbers");
  }

  int line_of(const std::string& key) const {
    const auto it = table_.entries.find(key);
    return it == table_.entries.end() ? table_.line : it->second.line;
  }

  // Every key must have been consumed.
  void finish() const {
    for (const auto& [key, entry] : table_.entries) {
      if (!seen_.count(key)) throw ScenarioError(entry.line, context_ + "unknown key '" + key + "'");
    }
  }

private:
  const toml_lite::Entry* take(const std::string& key) {
    seen_[key] = true;
    const auto it = table_.entries.find(key);
    return it == table_.entries.end() ? nullptr : &it->second;
  }

  const toml_lite::Table& table_;
  std::string context_;
  std::map<std::string, bool> seen_;
};

}  // namespace detail

/// Parse scenario text. Syntax and type errors throw ScenarioError; value
/// ranges are checked separately by validate_scenario.
inline Scenario parse_scenario(std::istream& in) {
  const auto doc = toml_lite::parse(in);
  Scenario sc;

  detail::TableReader root(doc.root, "");
  const auto total = root.number("p_total_w");
  if (!total) throw ScenarioError(0, "missing required key 'p_total_w'");
  sc.p_total_w = *total;
  sc.p_total_line = root.line_of("p_total_w");
  if (auto q = root.number("qos_target")) {
    sc.qos_target = *q;
    sc.qos_target_line = root.line_of("qos_target");
  }
  if (auto m = root.string("mode")) {
    const auto mode = parse_run_mode(*m);
    if (!mode) {
      throw ScenarioError(root.line_of("mode"),
                          "mode must be one of baseline, power-limit, both (got '" + *m + "')");
    }
    sc.mode = *mode;
  }
  if (auto dir = root.string("output_dir")) sc.output_dir = *dir;
  root.finish();

  for (const auto& [name, table] : doc.tables) {
    if (name != "convergence" && name != "channel") {
      throw ScenarioError(table.line, "unknown table [" + name + "]");
    }
  }
  for (const auto& [name, tables] : doc.arrays) {
    if (name != "ue") throw ScenarioError(tables.front().line, "unknown table array [[" + name + "]]");
  }

  if (const auto it = doc.tables.find("convergence"); it != doc.tables.end()) {
    detail::TableReader r(it->second, "convergence.");
    sc.convergence_line = it->second.line;
    auto& c = sc.convergence;
    c.delta = r.number("delta").value_or(c.delta);
    c.l1 = r.number("l1").value_or(c.l1);
    c.l2 = r.number("l2").value_or(c.l2);
    c.w_init = r.number("w_init").value_or(c.w_init);
    c.max_iterations = r.integer("max_iterations").value_or(c.max_iterations);
    c.root_tolerance = r.number("root_tolerance").value_or(c.root_tolerance);
    r.finish();
  }

  if (const auto it = doc.tables.find("channel"); it != doc.tables.end()) {
    detail::TableReader r(it->second, "channel.");
    ChannelSpec ch;
    ch.line = it->second.line;
    ch.carrier_frequency_hz = r.number("carrier_frequency_hz").value_or(ch.carrier_frequency_hz);
    ch.path_loss_exponent = r.number("path_loss_exponent").value_or(ch.path_loss_exponent);
    ch.cell_radius_m = r.number("cell_radius_m");
    ch.zone_edges_m = r.numbers("zone_edges_m");
    r.finish();
    sc.channel = std::move(ch);
  }

  if (const auto it = doc.arrays.find("ue"); it != doc.arrays.end()) {
    for (const auto& table : it->second) {
      detail::TableReader r(table, "ue.");
      UeSpec ue;
      ue.line = table.line;
      const auto id = r.integer("id");
      if (!id) throw ScenarioError(table.line, "ue entry is missing 'id'");
      ue.id = *id;
      ue.cqi = r.integer("cqi");
      ue.a = r.number("a");
      ue.b = r.number("b");
      ue.distance_m = r.number("distance_m");
      ue.power_limit_w = r.number("power_limit_w");
      ue.qos_power_w = r.number("qos_power_w");
      r.finish();
      sc.ues.push_back(ue);
    }
  }
  return sc;
}

inline Scenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, "cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

/// A UE ready for allocation, plus the CQI it was derived from (if any).
struct ResolvedUe {
  UeProfile profile;
  std::optional<int> cqi;
  bool has_power_limit = false;
};

namespace detail {

inline std::optional<CqiZoneMap> zone_map_of(const ChannelSpec& ch) {
  if (ch.zone_edges_m) return CqiZoneMap::from_edges(*ch.zone_edges_m);
  if (ch.cell_radius_m) return CqiZoneMap::equal_annuli(*ch.cell_radius_m);
  return std::nullopt;
}

}  // namespace detail

/// Range and consistency checks. `required` names the allocation mode(s) the
/// scenario will be run in; power-limit runs need a limit on every UE.
inline std::vector<Diagnostic> validate_scenario(const Scenario& sc, RunMode required) {
  std::vector<Diagnostic> out;
  auto add = [&](int line, std::string msg) { out.push_back({line, std::move(msg)}); };

  if (!(sc.p_total_w > 0.0)) add(sc.p_total_line, "p_total_w must be > 0");
  if (!(sc.qos_target > 0.0 && sc.qos_target < 1.0)) {
    add(sc.qos_target_line, "qos_target must lie in (0, 1)");
  }
  try {
    sc.convergence.validate();
  } catch (const DomainError& e) {
    add(sc.convergence_line, e.what());
  }

  std::optional<CqiZoneMap> zones;
  if (sc.channel) {
    try {
      PathLossModel(sc.channel->carrier_frequency_hz, sc.channel->path_loss_exponent);
      if (sc.channel->cell_radius_m && sc.channel->zone_edges_m) {
        add(sc.channel->line, "channel: give either cell_radius_m or zone_edges_m, not both");
      } else {
        zones = detail::zone_map_of(*sc.channel);
      }
    } catch (const std::exception& e) {
      add(sc.channel->line, std::string("channel: ") + e.what());
    }
  }

  if (sc.ues.empty()) add(0, "scenario needs at least one [[ue]]");
  std::map<int, int> seen_ids;
  const bool needs_limits = required != RunMode::Baseline;
  for (const auto& ue : sc.ues) {
    const std::string who = "ue " + std::to_string(ue.id) + ": ";
    if (auto [it, fresh] = seen_ids.emplace(ue.id, ue.line); !fresh) {
      add(ue.line, who + "duplicate id (first defined on line " + std::to_string(it->second) + ")");
    }
    const int sources = (ue.cqi ? 1 : 0) + ((ue.a || ue.b) ? 1 : 0) + (ue.distance_m ? 1 : 0);
    if (sources != 1) {
      add(ue.line, who + "specify exactly one of cqi, (a, b) or distance_m");
    }
    if (ue.cqi && (*ue.cqi < kMinCqi || *ue.cqi > kMaxCqi)) {
      add(ue.line, who + "cqi out of range 1..15");
    }
    if (ue.a || ue.b) {
      if (!ue.a || !ue.b) {
        add(ue.line, who + "explicit utility needs both a and b");
      } else if (!(*ue.a > 0.0) || !(*ue.b > 0.0)) {
        add(ue.line, who + "a and b must be > 0");
      }
    }
    if (ue.distance_m) {
      if (!sc.channel) {
        add(ue.line, who + "distance_m requires a [channel] table");
      } else if (!(*ue.distance_m > 0.0)) {
        add(ue.line, who + "distance_m must be > 0");
      } else if (!zones) {
        add(ue.line, who + "distance_m requires a valid channel.cell_radius_m or channel.zone_edges_m");
      } else if (!cqi_of_distance(*zones, *ue.distance_m)) {
        add(ue.line, who + "distance_m is outside the CQI zone map coverage");
      }
    }
    if (ue.power_limit_w && !(*ue.power_limit_w > 0.0)) {
      add(ue.line, who + "power_limit_w must be > 0");
    }
    if (ue.qos_power_w && !(*ue.qos_power_w > 0.0)) {
      add(ue.line, who + "qos_power_w must be > 0");
    }
    if (needs_limits && !ue.power_limit_w) {
      add(ue.line, who + "missing power_limit_w (required for power-limit mode)");
    }
  }
  return out;
}

/// Turn a validated scenario into allocator inputs. Throws ScenarioError if
/// the scenario does not validate for `mode`.
inline std::vector<ResolvedUe> resolve_ues(const Scenario& sc, RunMode mode) {
  if (const auto diags = validate_scenario(sc, mode); !diags.empty()) {
    throw ScenarioError(diags.front().line, diags.front().message);
  }
  std::optional<CqiZoneMap> zones;
  if (sc.channel) zones = detail::zone_map_of(*sc.channel);

  std::vector<ResolvedUe> out;
  for (const auto& ue : sc.ues) {
    std::optional<int> cqi = ue.cqi;
    if (ue.distance_m) cqi = cqi_of_distance(*zones, *ue.distance_m);
    const SigmoidalUtility u = cqi ? catalog_lookup(*cqi).utility : SigmoidalUtility(*ue.a, *ue.b);

    UeProfile profile{ue.id, u};
    if (ue.power_limit_w) profile.power_limit = *ue.power_limit_w;
    if (ue.qos_power_w) {
      profile.qos_power = *ue.qos_power_w;
    } else if (ue.power_limit_w) {
      profile.qos_power = *ue.power_limit_w;
    } else {
      profile.qos_power = qos_threshold(u, sc.qos_target);
    }
    out.push_back({profile, cqi, ue.power_limit_w.has_value()});
  }
  return out;
}

inline std::vector<UeProfile> profiles_of(const std::vector<ResolvedUe>& ues) {
  std::vector<UeProfile> out;
  out.reserve(ues.size());
  for (const auto& u : ues) out.push_back(u.profile);
  return out;
}

}  // namespace qosalloc
