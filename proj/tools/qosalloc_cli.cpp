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

// qosalloc: scenario runner for the bidding power allocator.
//
//   qosalloc run SCENARIO [--mode baseline|power-limit|both] [--out DIR] ...
//   qosalloc validate SCENARIO [--mode ...]
//   qosalloc fit SAMPLES.csv
//   qosalloc catalog
//
// Exit codes: 0 success, 1 non-convergence, 2 invalid input.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qosalloc/qosalloc.hpp"

namespace fs = std::filesystem;
using namespace qosalloc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitInvalid = 2;

struct Overrides {
  std::string mode;
  std::string out_dir;
  std::optional<int> max_iter;
  std::optional<double> delta;
  std::optional<double> l1;
  std::optional<double> l2;
  std::optional<double> w_init;
};

void apply(const Overrides& o, Scenario& sc) {
  if (!o.mode.empty()) sc.mode = *parse_run_mode(o.mode);
  if (!o.out_dir.empty()) sc.output_dir = o.out_dir;
  if (o.max_iter) sc.convergence.max_iterations = *o.max_iter;
  if (o.delta) sc.convergence.delta = *o.delta;
  if (o.l1) sc.convergence.l1 = *o.l1;
  if (o.l2) sc.convergence.l2 = *o.l2;
  if (o.w_init) sc.convergence.w_init = *o.w_init;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_outputs(const fs::path& dir, const AllocationResult& r, std::span<const ResolvedUe> ues) {
  fs::create_directories(dir);
  std::ostringstream alloc;
  write_allocations_csv(alloc, r, ues);
  write_file(dir / "allocations.csv", alloc.str());
  std::ostringstream traj;
  write_trajectory_csv(traj, r);
  write_file(dir / "trajectory.csv", traj.str());
  write_file(dir / "report.json", report_json(r, ues).dump(2) + "\n");
}

void print_table(const AllocationResult& r, std::span<const ResolvedUe> ues) {
  std::printf("%s: %d iterations, %s, final price %.6g /W\n", to_string(r.mode), r.iterations,
              r.converged ? "converged" : "NOT converged", r.final_price());
  std::printf("  %5s %4s %12s %12s %10s %s\n", "ue", "cqi", "limit_w", "alloc_w", "status", "qos");
  for (std::size_t i = 0; i < r.ues.size(); ++i) {
    const auto& o = r.ues[i];
    const std::string cqi = ues[i].cqi ? std::to_string(*ues[i].cqi) : "-";
    const std::string limit = ues[i].has_power_limit ? format_number(ues[i].profile.power_limit) : "-";
    std::printf("  %5d %4s %12s %12.6f %10s %s\n", o.id, cqi.c_str(), limit.c_str(), o.power,
                to_string(o.status), o.reached_qos ? "yes" : "no");
  }
  std::printf("  total %.6f W of %.6f W, %d/%zu reach QoS%s\n", r.total_power(), r.initial_power,
              r.qos_reached_count(), r.ues.size(), r.infeasible ? " (INFEASIBLE)" : "");
}

int report_diagnostics(const std::vector<Diagnostic>& diags, const std::string& file) {
  for (const auto& d : diags) std::cerr << file << ": " << d.to_string() << '\n';
  return diags.empty() ? kExitOk : kExitInvalid;
}

int cmd_validate(const std::string& file, const Overrides& o) {
  try {
    auto sc = load_scenario(file);
    apply(o, sc);
    const int rc = report_diagnostics(validate_scenario(sc, sc.mode), file);
    if (rc == kExitOk) {
      std::cout << file << ": valid (" << sc.ues.size() << " UEs, mode " << to_string(sc.mode)
                << ")\n";
    }
    return rc;
  } catch (const ScenarioError& e) {
    std::cerr << file << ": " << e.what() << '\n';
    return kExitInvalid;
  }
}

int cmd_run(const std::string& file, const Overrides& o) {
  Scenario sc;
  std::vector<ResolvedUe> ues;
  try {
    sc = load_scenario(file);
    apply(o, sc);
    if (const int rc = report_diagnostics(validate_scenario(sc, sc.mode), file); rc != kExitOk) {
      return rc;
    }
    ues = resolve_ues(sc, sc.mode);
  } catch (const ScenarioError& e) {
    std::cerr << file << ": " << e.what() << '\n';
    return kExitInvalid;
  }

  const auto profiles = profiles_of(ues);
  const fs::path out_dir(sc.output_dir);
  bool ok = true;
  auto run_one = [&](AllocationMode mode, const fs::path& dir) {
    auto r = run_allocation(mode, profiles, sc.p_total_w, sc.convergence);
    write_outputs(dir, r, ues);
    print_table(r, ues);
    ok = ok && r.converged && !r.infeasible;
    return r;
  };

  switch (sc.mode) {
    case RunMode::Baseline:
      run_one(AllocationMode::Baseline, out_dir);
      break;
    case RunMode::PowerLimit:
      run_one(AllocationMode::PowerLimit, out_dir);
      break;
    case RunMode::Both: {
      const auto base = run_one(AllocationMode::Baseline, out_dir / "baseline");
      const auto limited = run_one(AllocationMode::PowerLimit, out_dir / "power-limit");
      write_file(out_dir / "comparison.json", comparison_json(base, limited, ues).dump(2) + "\n");
      std::cout << summary_line(base, limited) << '\n';
      break;
    }
  }
  std::cout << "outputs written to " << out_dir.string() << '\n';
  if (!ok) {
    std::cerr << file << ": allocation did not converge cleanly; outputs are flagged\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_fit(const std::string& file, std::optional<double> a0, std::optional<double> b0,
            int max_iter) {
  try {
    const auto samples = read_fit_samples(file);
    FitConfig cfg;
    cfg.initial_a = a0;
    cfg.initial_b = b0;
    cfg.max_iterations = max_iter;
    const auto r = fit_sigmoid(samples, cfg);
    std::printf("a = %.6f\nb = %.6f\nssr = %.6g\niterations = %d\nconverged = %s\n", r.a, r.b,
                r.ssr, r.iterations, r.converged ? "true" : "false");
    return r.converged ? kExitOk : kExitNotConverged;
  } catch (const std::exception& e) {
    std::cerr << file << ": " << e.what() << '\n';
    return kExitInvalid;
  }
}

int cmd_catalog(double theta) {
  std::printf("%4s %6s %5s %7s %8s %8s %14s\n", "cqi", "mod", "rate", "eff", "a", "b", "qos_power_w");
  for (const auto& e : UtilityCatalog::entries()) {
    std::printf("%4d %6s %5d %7.4f %8.4f %8.4f %14.4f\n", e.cqi_index,
                std::string(to_string(e.modulation)).c_str(), e.code_rate_x1024, e.efficiency,
                e.utility.a(), e.utility.b(), qos_threshold(e.utility, theta));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utility-proportional-fair power allocation with per-UE power limits"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string scenario_file;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario_file, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--mode", overrides.mode, "baseline, power-limit or both")
        ->check(CLI::IsMember({"baseline", "power-limit", "both"}));
  };

  auto* run = app.add_subcommand("run", "Run the allocation and write CSV/JSON outputs");
  add_common(run);
  run->add_option("--out", overrides.out_dir, "Output directory");
  run->add_option("--max-iter", overrides.max_iter, "Iteration cap");
  run->add_option("--delta", overrides.delta, "Bid-change convergence tolerance");
  run->add_option("--l1", overrides.l1, "Fluctuation cap scale");
  run->add_option("--l2", overrides.l2, "Fluctuation cap decay length");
  run->add_option("--w-init", overrides.w_init, "Initial bid");

  auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
  add_common(validate);

  std::string samples_file;
  std::optional<double> a0, b0;
  int fit_max_iter = 1000;
  auto* fit = app.add_subcommand("fit", "Fit sigmoid (a, b) to a power_w,utility CSV");
  fit->add_option("samples", samples_file, "Sample CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--a0", a0, "Initial steepness");
  fit->add_option("--b0", b0, "Initial inflection power");
  fit->add_option("--max-iter", fit_max_iter, "Iteration cap");

  double theta = kDefaultQosTarget;
  auto* catalog = app.add_subcommand("catalog", "Print the CQI utility catalog");
  catalog->add_option("--theta", theta, "QoS target for the threshold column")
      ->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(scenario_file, overrides);
    if (*validate) return cmd_validate(scenario_file, overrides);
    if (*fit) return cmd_fit(samples_file, a0, b0, fit_max_iter);
    if (*catalog) return cmd_catalog(theta);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
